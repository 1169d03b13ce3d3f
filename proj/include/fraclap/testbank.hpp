#pragma once

#include <string>
#include <vector>

#include "fraclap/testfunction.hpp"

namespace fraclap::bank {

// Standard entries: Gaussian (with shifted/scaled variants), Cauchy-type decay,
// and a smooth compactly supported bump.
std::vector<TestFunction> bank_standard(const Params& P);

// Special entries: the harmonic polynomial x1^2 - x2^2 (d >= 2) and
// |x1|^{alpha-1} (alpha in (1,2)).
std::vector<TestFunction> bank_special(const Params& P);

// Shell counterexamples: in the singular-integral domain but not Dynkin's,
// and in the semigroup domain but not the singular-integral one.
std::vector<TestFunction> bank_pathological(const Params& P);

std::vector<TestFunction> bank_all(const Params& P);

TestFunction find(const Params& P, const std::string& name);

// Self-validation of an entry's metadata (gradient vs central differences,
// Fourier profile inverting back to the evaluator). Returns found problems.
std::vector<std::string> validate(const Params& P, const TestFunction& tf);

}  // namespace fraclap::bank

#pragma once

/// \file freeplate.hpp
///
/// Convenience header pulling in the whole numerical library.

#include "freeplate/bessel.hpp"
#include "freeplate/errors.hpp"
#include "freeplate/modes.hpp"
#include "freeplate/quadrature.hpp"
#include "freeplate/roots.hpp"
#include "freeplate/serialize.hpp"
#include "freeplate/spectrum.hpp"
#include "freeplate/verify.hpp"

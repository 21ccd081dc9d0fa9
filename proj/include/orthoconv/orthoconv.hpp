#pragma once

// Umbrella header: exact transform matrices for convolutional layers,
// the L_orth orthogonality penalty and its gradient, residual-based
// certification, singular spectra, and the optimization experiments.

#include "orthoconv/architecture.hpp"
#include "orthoconv/convmat.hpp"
#include "orthoconv/errors.hpp"
#include "orthoconv/io.hpp"
#include "orthoconv/kernel.hpp"
#include "orthoconv/lorth.hpp"
#include "orthoconv/optim.hpp"
#include "orthoconv/residual.hpp"
#include "orthoconv/rng.hpp"
#include "orthoconv/spectral.hpp"
#include "orthoconv/version.hpp"

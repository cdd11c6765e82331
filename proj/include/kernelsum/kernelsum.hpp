#pragma once

#include "errors.hpp"
#include "numeric.hpp"
#include "random.hpp"
#include "specfun.hpp"
#include "kernels.hpp"
#include "fft.hpp"
#include "fourier_coeffs.hpp"
#include "nufft.hpp"
#include "fastsum1d.hpp"
#include "points.hpp"
#include "slicer.hpp"
#include "baselines.hpp"
#include "bench.hpp"

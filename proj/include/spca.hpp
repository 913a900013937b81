#pragma once

#include "spca/baselines.hpp"
#include "spca/error.hpp"
#include "spca/linalg.hpp"
#include "spca/rng.hpp"
#include "spca/spca.hpp"
#include "spca/stats.hpp"
#include "spca/synth.hpp"
#include "spca/theory.hpp"
#include "spca/wavelet.hpp"

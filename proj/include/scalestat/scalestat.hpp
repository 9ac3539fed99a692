#pragma once

#include "scalestat/core/dataset.hpp"
#include "scalestat/core/error.hpp"
#include "scalestat/core/observed_matrix.hpp"
#include "scalestat/core/parallel.hpp"
#include "scalestat/core/rng.hpp"
#include "scalestat/core/sampling.hpp"
#include "scalestat/core/timer.hpp"
#include "scalestat/core/weighted_sample.hpp"
#include "scalestat/estimators/estimators.hpp"
#include "scalestat/estimators/intervals.hpp"
#include "scalestat/resampling/resampling.hpp"
#include "scalestat/matcomp/complete.hpp"
#include "scalestat/matcomp/low_rank.hpp"
#include "scalestat/matcomp/svd.hpp"
#include "scalestat/matcomp/svt.hpp"
#include "scalestat/dfc/dfc.hpp"
#include "scalestat/convex/body.hpp"
#include "scalestat/convex/complexity.hpp"
#include "scalestat/convex/denoise.hpp"
#include "scalestat/convex/elliptope.hpp"
#include "scalestat/convex/nnls.hpp"
#include "scalestat/convex/nuclear_ball.hpp"
#include "scalestat/convex/polytope.hpp"
#include "scalestat/convex/signals.hpp"
#include "scalestat/convex/tangent_cone.hpp"
#include "scalestat/bench/config.hpp"
#include "scalestat/bench/csv.hpp"
#include "scalestat/bench/experiments.hpp"
#include "scalestat/bench/synthetic.hpp"

#ifndef SEGQC_SEGQC_HPP
#define SEGQC_SEGQC_HPP

// Umbrella header for the segmentation quality-control toolkit.

#include "segqc/ca/architecture.hpp"
#include "segqc/ca/checkpoint.hpp"
#include "segqc/ca/model.hpp"
#include "segqc/ca/trainer.hpp"
#include "segqc/data/manifest.hpp"
#include "segqc/data/synth.hpp"
#include "segqc/mask.hpp"
#include "segqc/metrics/distance_transform.hpp"
#include "segqc/metrics/scores.hpp"
#include "segqc/monitor/ranking.hpp"
#include "segqc/monitor/records.hpp"
#include "segqc/monitor/stats.hpp"
#include "segqc/nn/adam.hpp"
#include "segqc/nn/gradcheck.hpp"
#include "segqc/nn/init.hpp"
#include "segqc/nn/layers.hpp"
#include "segqc/nn/losses.hpp"
#include "segqc/nn/network.hpp"
#include "segqc/nn/tensor.hpp"
#include "segqc/pgm.hpp"
#include "segqc/verify.hpp"

#endif

#pragma once

#include "gaitlab/archive.hpp"
#include "gaitlab/asf_amc.hpp"
#include "gaitlab/cycles.hpp"
#include "gaitlab/dataset_io.hpp"
#include "gaitlab/dtw.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/eval/classification.hpp"
#include "gaitlab/eval/distance_matrix.hpp"
#include "gaitlab/eval/experiment.hpp"
#include "gaitlab/eval/report.hpp"
#include "gaitlab/eval/separability.hpp"
#include "gaitlab/eval/splits.hpp"
#include "gaitlab/eval/verification.hpp"
#include "gaitlab/geometric.hpp"
#include "gaitlab/ingest.hpp"
#include "gaitlab/learning.hpp"
#include "gaitlab/mocap.hpp"
#include "gaitlab/scatter.hpp"
#include "gaitlab/synth.hpp"
#include "gaitlab/transform.hpp"

// SPDX-License-Identifier: Apache-2.0
//
// nlosid: pathloss-based LOS/NLOS link identification
// ------------------------------------------------------------------------

#pragma once

#include "common.hpp"
#include "pathloss.hpp"
#include "channelsim.hpp"
#include "dataset_io.hpp"
#include "plfit.hpp"
#include "metrics.hpp"
#include "bht.hpp"

#include "ml/features.hpp"
#include "ml/split.hpp"
#include "ml/standardizer.hpp"
#include "ml/logreg.hpp"
#include "ml/discriminant.hpp"
#include "ml/linear_svm.hpp"
#include "ml/rbf_svm.hpp"
#include "ml/model.hpp"
#include "ml/selection.hpp"

#include "report.hpp"
#include "config.hpp"
#include "pipeline.hpp"

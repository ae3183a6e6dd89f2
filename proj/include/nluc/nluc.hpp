#pragma once

#include "nluc/compressed_map.hpp"
#include "nluc/error.hpp"
#include "nluc/features.hpp"
#include "nluc/hash_family.hpp"
#include "nluc/linear_model.hpp"
#include "nluc/mphf.hpp"
#include "nluc/packed_array.hpp"
#include "nluc/quantizer.hpp"
#include "nluc/rank_bitvector.hpp"
#include "nluc/report.hpp"
#include "nluc/synthetic.hpp"
#include "nluc/tsv.hpp"

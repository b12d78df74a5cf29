#pragma once

#include "conceptscope/common.hpp"
#include "conceptscope/random.hpp"
#include "conceptscope/csv.hpp"
#include "conceptscope/text.hpp"
#include "conceptscope/corpus.hpp"
#include "conceptscope/vocabulary.hpp"
#include "conceptscope/phrases.hpp"
#include "conceptscope/embedding.hpp"
#include "conceptscope/embedding_io.hpp"
#include "conceptscope/sgns.hpp"
#include "conceptscope/timeline.hpp"
#include "conceptscope/metrics.hpp"
#include "conceptscope/stats.hpp"
#include "conceptscope/report.hpp"
#include "conceptscope/synthetic.hpp"
#include "conceptscope/checksum.hpp"
#include "conceptscope/config.hpp"
#include "conceptscope/pipeline.hpp"

#pragma once

#include "docembed/cli.hpp"
#include "docembed/common_component.hpp"
#include "docembed/corpus_stats.hpp"
#include "docembed/embedder.hpp"
#include "docembed/errors.hpp"
#include "docembed/evaluation.hpp"
#include "docembed/harness.hpp"
#include "docembed/tokenizer.hpp"
#include "docembed/vector_store.hpp"
#include "docembed/weighting.hpp"

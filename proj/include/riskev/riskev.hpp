#pragma once

#include "riskev/baseline_model.hpp"
#include "riskev/corpus.hpp"
#include "riskev/csv.hpp"
#include "riskev/dataset.hpp"
#include "riskev/error.hpp"
#include "riskev/eval.hpp"
#include "riskev/generator.hpp"
#include "riskev/highlight.hpp"
#include "riskev/lexicon.hpp"
#include "riskev/remote.hpp"
#include "riskev/scoring.hpp"
#include "riskev/summary.hpp"
#include "riskev/text.hpp"

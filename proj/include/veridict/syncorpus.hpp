#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "veridict/corpus.hpp"
#include "veridict/lang.hpp"
#include "veridict/util.hpp"

namespace veridict::syncorpus {

/// Published corpus-scale totals a generated corpus reproduces exactly.
struct CellTargets {
    int documents = 0;
    int paragraphs = 0;
    int sentences = 0;
    int words = 0;
};

CellTargets targets_for(Language language, Label label);

/// Splits total into n parts, each >= min_each, summing to total exactly.
/// jitter in [0,1] controls how uneven the parts get.
std::vector<int> partition_exact(int total, int n, int min_each, double jitter, Rng& rng);

/// Every dictionary word the generator can emit for a language (typos and
/// acronyms excluded). The language's spelling dictionary must cover these.
std::vector<std::string> vocabulary(Language language);

/// All-caps tokens humans drop in occasionally; deliberately absent from the
/// spelling dictionary.
std::vector<std::string> acronym_pool(Language language);

/// Deterministic corpus: 100 documents per (language, label) cell, 10 per
/// topic, with paragraph/sentence/word totals hitting targets_for exactly
/// under this toolkit's segmentation. Each document is verified against the
/// language pack before it is returned.
std::vector<corpus::Document> generate(const corpus::PackSet& packs, std::uint64_t seed);

}  // namespace veridict::syncorpus

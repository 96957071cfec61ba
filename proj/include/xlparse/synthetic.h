// Synthetic data generators: a POS-deterministic grammar, random
// dictionary-translated parallel text, and a two-language world whose
// prepositional attachments depend on lexical class.

#ifndef XLPARSE_SYNTHETIC_H_
#define XLPARSE_SYNTHETIC_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xlparse/alignment.h"
#include "xlparse/treebank.h"

namespace xlparse {

// Sentences "DET ADJ? NOUN VERB DET ADJ? NOUN ADV? PUNCT" where heads are
// a function of the UPOS sequence.
Treebank deterministic_treebank(int sentences, std::uint64_t seed, const std::string& language = "xx");

struct DictionaryCorpus {
  ParallelCorpus pairs;
  std::map<std::string, std::string> dictionary;  // source -> target
};
// Word-for-word translations of random sentences (Zipf-like word choice)
// with the target order shuffled.
DictionaryCorpus dictionary_parallel_corpus(int pairs, int vocabulary, std::uint64_t seed);

struct WorldOptions {
  std::string source_language = "src";
  std::string target_language = "tgt";
  int source_train = 500;   // gold source treebank
  int parallel = 500;       // POS-tagged sentence pairs
  int target_test = 200;    // gold target evaluation treebank
  int target_raw = 500;     // POS-tagged target text for self-training
  int monolingual = 2000;   // raw sentences per language for clustering
  int max_pp = 3;
  double part_rate = 0.3;   // target-only particle after the verb
  double generic_pp_rate = 0.4;  // share of PPs headed by the generic preposition
  std::uint64_t seed = 7;
};

// Both languages share the UPOS grammar
//   DET ADJ? NOUN VERB DET ADJ? NOUN (ADP NOUN){0..max_pp} PUNCT
// with a 1:1 dictionary. A prepositional noun of the instrument class
// attaches to the verb (obl); one of the attribute class attaches to the
// nearest preceding noun (nmod). Class-specific prepositions mark the class
// in the word distribution. After the generic preposition the class is a
// property of the noun alone, visible only to word identity. The target
// language may add a particle after the verb.
struct World {
  WorldOptions options;
  Treebank source_train;
  Treebank target_test;
  Treebank target_raw;       // trees stripped
  Treebank parallel_source;  // trees stripped
  Treebank parallel_target;  // trees stripped
  Treebank parallel_target_gold;
  MonolingualCorpus source_mono;
  MonolingualCorpus target_mono;
  std::map<std::string, std::string> dictionary;  // source -> target
};

World make_world(const WorldOptions& options = {});

// Writes the world as files plus an experiment config "<mode>.conf" per
// pipeline mode into `dir`.
void write_world(const World& world, const std::string& dir);

}  // namespace xlparse

#endif  // XLPARSE_SYNTHETIC_H_

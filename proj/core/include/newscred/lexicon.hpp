// lexicon.hpp — stylistic lexicons and relative-frequency style features.
//
// A lexicon is a set of named categories (hedges, assertives, bias, ...),
// each holding lowercase single- or multi-word entries. Style features are
// per-category relative frequencies over a token stream: the number of token
// positions at which a category entry starts, divided by the token count.

#ifndef NEWSCRED_LEXICON_HPP
#define NEWSCRED_LEXICON_HPP

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "newscred/util.hpp"

namespace newscred {

class Lexicon {
 public:
  /// Entries are token sequences; single-word entries have length 1.
  using Entry = std::vector<std::string>;

  void add_entry(const std::string& category, const Entry& entry);

  /// Registers a category, possibly with no entries yet.
  void ensure_category(const std::string& category) {
    categories_[category];
  }

  const std::map<std::string, std::vector<Entry>>& categories() const {
    return categories_;
  }

  std::vector<std::string> category_names() const;

  std::size_t category_size(const std::string& name) const;

  bool empty() const { return categories_.empty(); }

 private:
  std::map<std::string, std::vector<Entry>> categories_;
};

/// Loads every *.txt file in dir as one category named by the file stem.
/// One entry per line; blank lines and '#'-prefixed comment lines skipped;
/// entries are lowercased on load. Throws on an empty directory or when two
/// files map to the same stem.
Lexicon load_lexicons(const std::string& dir);

struct StyleFeatures {
  FeatureMap dims;  // category name -> relative frequency in [0,1]
  std::size_t token_count = 0;
};

/// Counts, for every category, the token positions where an entry match
/// starts (multiword entries match as contiguous token runs; a position
/// counts at most once per category) and divides by the token count.
/// All dims are 0 when the token stream is empty.
StyleFeatures style_features(const std::vector<std::string>& tokens,
                             const Lexicon& lexicon);

StyleFeatures style_features(const std::string& text, const Lexicon& lexicon);

}  // namespace newscred

#endif  // NEWSCRED_LEXICON_HPP

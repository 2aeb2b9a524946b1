#include "newscred/lexicon.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "newscred/text.hpp"

namespace fs = std::filesystem;

namespace newscred {

void Lexicon::add_entry(const std::string& category, const Entry& entry) {
  if (entry.empty()) {
    throw std::runtime_error("lexicon: empty entry in category '" + category +
                             "'");
  }
  categories_[category].push_back(entry);
}

std::vector<std::string> Lexicon::category_names() const {
  std::vector<std::string> names;
  names.reserve(categories_.size());
  for (const auto& [name, entries] : categories_) names.push_back(name);
  return names;
}

std::size_t Lexicon::category_size(const std::string& name) const {
  auto it = categories_.find(name);
  return it == categories_.end() ? 0 : it->second.size();
}

Lexicon load_lexicons(const std::string& dir) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("lexicon directory not found: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw std::runtime_error("lexicon directory has no .txt files: " + dir);
  }

  Lexicon lexicon;
  std::set<std::string> seen_stems;
  for (const auto& path : files) {
    const std::string stem = path.stem().string();
    if (!seen_stems.insert(stem).second) {
      throw std::runtime_error("duplicate lexicon category: " + stem);
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open lexicon file: " + path.string());
    lexicon.ensure_category(stem);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() == '#') continue;
      const auto tokens = tokenize(line);
      if (tokens.empty()) continue;  // blank or punctuation-only line
      lexicon.add_entry(stem, tokens);
    }
  }
  return lexicon;
}

StyleFeatures style_features(const std::vector<std::string>& tokens,
                             const Lexicon& lexicon) {
  StyleFeatures out;
  out.token_count = tokens.size();
  for (const auto& [name, entries] : lexicon.categories()) {
    double matches = 0;
    if (!tokens.empty()) {
      for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
        for (const auto& entry : entries) {
          if (entry.size() > tokens.size() - pos) continue;
          bool hit = true;
          for (std::size_t k = 0; k < entry.size(); ++k) {
            if (tokens[pos + k] != entry[k]) {
              hit = false;
              break;
            }
          }
          if (hit) {
            matches += 1;
            break;  // a start position counts once per category
          }
        }
      }
    }
    out.dims[name] =
        tokens.empty() ? 0.0 : matches / static_cast<double>(tokens.size());
  }
  return out;
}

StyleFeatures style_features(const std::string& text, const Lexicon& lexicon) {
  return style_features(tokenize(text), lexicon);
}

}  // namespace newscred

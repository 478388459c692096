#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "semno/cleanse.hpp"
#include "semno/error.hpp"
#include "semno/rng.hpp"

namespace semno {

namespace {

// NLTK English list (179 words).
constexpr std::string_view kEnglish[] = {
    "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
    "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him", "his",
    "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its", "itself",
    "they", "them", "their", "theirs", "themselves", "what", "which", "who", "whom", "this",
    "that", "that'll", "these", "those", "am", "is", "are", "was", "were", "be",
    "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing",
    "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
    "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "to", "from", "up", "down",
    "in", "out", "on", "off", "over", "under", "again", "further", "then", "once",
    "here", "there", "when", "where", "why", "how", "all", "any", "both", "each",
    "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only",
    "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
    "just", "don", "don't", "should", "should've", "now", "d", "ll", "m", "o",
    "re", "ve", "y", "ain", "aren", "aren't", "couldn", "couldn't", "didn", "didn't",
    "doesn", "doesn't", "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn", "isn't",
    "ma", "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't", "shouldn",
    "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't", "wouldn", "wouldn't",
};

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace

StopwordList::StopwordList(std::string language, std::vector<std::string> words)
    : language_(std::move(language)) {
  for (auto& w : words) words_.insert(lower(w));
}

bool StopwordList::contains(std::string_view word) const {
  return words_.contains(lower(word));
}

std::uint64_t StopwordList::digest() const {
  std::vector<std::string_view> sorted(words_.begin(), words_.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t h = fnv1a64(language_);
  for (auto w : sorted) h = fnv1a64("\n", fnv1a64(w, h));
  return h;
}

StopwordList load_stopwords(std::string_view path_or_tag) {
  if (path_or_tag == "english") {
    return StopwordList("english", std::vector<std::string>(std::begin(kEnglish), std::end(kEnglish)));
  }
  std::ifstream in{std::string(path_or_tag)};
  if (!in) {
    throw ConfigError("unknown stopword list '" + std::string(path_or_tag) +
                      "' (not a builtin tag and not a readable file)");
  }
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.pop_back();
    }
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos) continue;
    words.push_back(line.substr(start));
  }
  return StopwordList(std::string(path_or_tag), std::move(words));
}

}  // namespace semno

#include <doctest.h>

#include <sstream>

#include "semno/corpusio.hpp"
#include "semno/error.hpp"
#include "semno/rng.hpp"
#include "test_util.hpp"

using namespace semno;

namespace {

Corpus load_text(const std::string& csv, CsvSchema schema = {}) {
  std::istringstream in(csv);
  return load_corpus(in, schema);
}

ArtifactHeader corpus_header() {
  ArtifactHeader h;
  h.stage = "corpus";
  h.lineage = "00";
  return h;
}

}  // namespace

TEST_CASE("class labels normalize whitespace runs") {
  CHECK(ClassLabel("Service Brakes").name() == "Service-Brakes");
  CHECK(ClassLabel("  Fuel \t Propulsion  System ").name() == "Fuel-Propulsion-System");
  CHECK(ClassLabel("Seat-Belts").name() == "Seat-Belts");
  CHECK_THROWS_AS(ClassLabel(" \t "), ConfigError);
}

TEST_CASE("an NHTSA-style row becomes one document") {
  const Corpus c = load_text(
      "Component,Ticket Text\n"
      "Seat-Belts,\"Rear latch/striker failed in accident. Colorado state police.\"\n");
  REQUIRE(c.documents.size() == 1);
  CHECK(c.documents[0].label.name() == "Seat-Belts");
  CHECK(c.documents[0].id == "row-1");
  REQUIRE(c.documents[0].sentences.size() == 2);
  CHECK(c.documents[0].sentences[1].text == "Colorado state police.");
  CHECK(c.documents[0].sentences[1].index == 1);
}

TEST_CASE("header-only file gives an empty corpus without warnings") {
  const Corpus c = load_text("Component,Ticket Text\n");
  CHECK(c.documents.empty());
  CHECK(c.warnings.empty());
  CHECK(c.skipped_empty == 0);
  CHECK(c.skipped_malformed == 0);
}

TEST_CASE("empty-text rows are skipped and counted") {
  const Corpus c = load_text("Component,Ticket Text\nA,one.\nB,\nC,\"three. four\"\n");
  CHECK(c.documents.size() == 2);
  CHECK(c.skipped_empty == 1);
  CHECK(c.documents.size() + c.skipped_empty + c.skipped_malformed == 3);
}

TEST_CASE("RFC-4180 quoting, custom delimiter, id column and malformed rows") {
  CsvSchema schema;
  schema.class_column = "cls";
  schema.text_column = "txt";
  schema.id_column = "id";
  schema.delimiter = ';';
  const Corpus c = load_text(
      "id;cls;txt\n"
      "a;X;\"he said \"\"stop\"\"; then\nleft.\"\n"
      "b;Y;too;many\n"
      "a;X;duplicate id.\n"
      "c;Y Z;fine\n",
      schema);
  REQUIRE(c.documents.size() == 2);
  CHECK(c.documents[0].raw_text == "he said \"stop\"; then\nleft.");
  CHECK(c.documents[1].label.name() == "Y-Z");
  CHECK(c.skipped_malformed == 2);
  CHECK(c.warnings.size() == 2);
}

TEST_CASE("a missing column is a configuration error naming it") {
  try {
    load_text("Component,Body\nA,b\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("Ticket Text") != std::string::npos);
  }
  CHECK_THROWS_AS(load_corpus(std::filesystem::path("/nonexistent/x.csv"), CsvSchema{}), ConfigError);
}

TEST_CASE("sentence splitting on terminal punctuation") {
  CHECK(split_sentences("d", "A. B. C.").size() == 3);
  const auto one = split_sentences("d", "no terminator here");
  REQUIRE(one.size() == 1);
  CHECK(one[0].index == 0);
  CHECK(one[0].text == "no terminator here");
  const auto q = split_sentences("d", "Why? Because!  It broke.Twice");
  REQUIRE(q.size() == 3);
  CHECK(q[2].text == "It broke.Twice");
  CHECK(split_sentences("d", "   ").empty());
}

TEST_CASE("sentence reassembly reproduces raw text up to whitespace") {
  Rng rng(11);
  const std::vector<std::string> pieces = {"word", "x1", ".", "?", "!", " ", "  ", "\n"};
  for (int t = 0; t < 300; ++t) {
    std::string text;
    for (std::size_t i = 0, n = 1 + uniform_below(rng, 15); i < n; ++i) {
      text += pieces[uniform_below(rng, pieces.size())];
    }
    std::string joined;
    for (const auto& s : split_sentences("d", text)) joined += (joined.empty() ? "" : " ") + s.text;
    auto squash = [](const std::string& s) {
      std::string out;
      for (char ch : s) {
        if (ch == ' ' || ch == '\n') continue;
        out += ch;
      }
      return out;
    };
    CHECK(squash(joined) == squash(text));
  }
}

TEST_CASE("corpus artifact round-trips") {
  const auto dir = test_util::scratch_dir("corpus");
  Corpus empty;
  save_corpus(dir / "empty.tsv", corpus_header(), empty);
  CHECK(load_corpus_artifact(dir / "empty.tsv", nullptr) == empty);

  Corpus two = load_text(
      "Component,Ticket Text\n"
      "Seat Belts,\"Belt\ttore. Second, with \\\\ backslash!\"\n"
      "Air Bags,Did not deploy.\n");
  two.skipped_empty = 4;
  save_corpus(dir / "two.tsv", corpus_header(), two);
  ArtifactHeader h;
  const Corpus back = load_corpus_artifact(dir / "two.tsv", &h);
  CHECK(h == corpus_header());
  CHECK(back == two);
  REQUIRE(back.documents.size() == 2);
  CHECK(back.documents[0].sentences[0].text == "Belt\ttore.");
}

TEST_CASE("corpus artifact round-trips on random fixtures") {
  Rng rng(23);
  const std::string alphabet = "ab .!?\t\\,\"";
  for (int t = 0; t < 50; ++t) {
    Corpus c;
    for (std::size_t d = 0, nd = uniform_below(rng, 5); d < nd; ++d) {
      Document doc;
      doc.id = "doc" + std::to_string(d);
      doc.label = ClassLabel("L" + std::to_string(uniform_below(rng, 3)));
      for (std::size_t i = 0, n = 1 + uniform_below(rng, 30); i < n; ++i) {
        doc.raw_text += alphabet[uniform_below(rng, alphabet.size())];
      }
      doc.raw_text = "x" + doc.raw_text;
      doc.sentences = split_sentences(doc);
      c.documents.push_back(std::move(doc));
    }
    CHECK(parse_corpus(serialize_corpus(corpus_header(), c), nullptr) == c);
  }
}

TEST_CASE("loading an artifact with the wrong version fails") {
  const auto dir = test_util::scratch_dir("corpusver");
  write_atomic(dir / "bad.tsv", "#semno 7 corpus 00\nC\t0\t0\n");
  CHECK_THROWS_AS(load_corpus_artifact(dir / "bad.tsv", nullptr), ArtifactError);
  write_atomic(dir / "bad2.tsv", "plain text\n");
  CHECK_THROWS_AS(load_corpus_artifact(dir / "bad2.tsv", nullptr), ArtifactError);
}

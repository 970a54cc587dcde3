#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "io.hpp"
#include "utf8.hpp"

namespace topicmod {

struct RawDocument {
  std::string id;
  std::string text;
};

enum class PreprocessLevel { partial, full };

inline const char *to_string(PreprocessLevel level) noexcept {
  return level == PreprocessLevel::full ? "full" : "partial";
}

inline PreprocessLevel parse_level(std::string_view s) {
  if (s == "partial")
    return PreprocessLevel::partial;
  if (s == "full")
    return PreprocessLevel::full;
  throw Error(ErrorKind::invalid_config,
              "unknown preprocessing level '" + std::string(s) + "'");
}

struct PreprocessConfig {
  PreprocessLevel level = PreprocessLevel::partial;
  std::optional<std::string> lemma_table_path;
};

struct CleanDocument {
  std::string id;
  std::vector<std::string> tokens;
  /// Set when cleaning left no tokens. Such documents are kept for id
  /// alignment but excluded from model fitting.
  bool empty = false;
};

struct CleanCorpus {
  PreprocessLevel level = PreprocessLevel::partial;
  std::vector<CleanDocument> documents;

  std::size_t size() const noexcept { return documents.size(); }
};

using LemmaTable = std::unordered_map<std::string, std::string>;

namespace detail {

struct CyrillicEntry {
  char32_t upper;
  char32_t lower;
  std::u32string_view latin_upper; // title-case form for digraphs
  std::u32string_view latin_lower;
};

// Serbian Cyrillic alphabet (30 letters) in azbuka order.
inline constexpr CyrillicEntry serbian_alphabet[] = {
    {U'А', U'а', U"A", U"a"},   {U'Б', U'б', U"B", U"b"},
    {U'В', U'в', U"V", U"v"},   {U'Г', U'г', U"G", U"g"},
    {U'Д', U'д', U"D", U"d"},   {U'Ђ', U'ђ', U"Đ", U"đ"},
    {U'Е', U'е', U"E", U"e"},   {U'Ж', U'ж', U"Ž", U"ž"},
    {U'З', U'з', U"Z", U"z"},   {U'И', U'и', U"I", U"i"},
    {U'Ј', U'ј', U"J", U"j"},   {U'К', U'к', U"K", U"k"},
    {U'Л', U'л', U"L", U"l"},   {U'Љ', U'љ', U"Lj", U"lj"},
    {U'М', U'м', U"M", U"m"},   {U'Н', U'н', U"N", U"n"},
    {U'Њ', U'њ', U"Nj", U"nj"}, {U'О', U'о', U"O", U"o"},
    {U'П', U'п', U"P", U"p"},   {U'Р', U'р', U"R", U"r"},
    {U'С', U'с', U"S", U"s"},   {U'Т', U'т', U"T", U"t"},
    {U'Ћ', U'ћ', U"Ć", U"ć"},   {U'У', U'у', U"U", U"u"},
    {U'Ф', U'ф', U"F", U"f"},   {U'Х', U'х', U"H", U"h"},
    {U'Ц', U'ц', U"C", U"c"},   {U'Ч', U'ч', U"Č", U"č"},
    {U'Џ', U'џ', U"Dž", U"dž"}, {U'Ш', U'ш', U"Š", U"š"},
};

struct CyrillicMatch {
  const CyrillicEntry *entry;
  bool upper;
};

inline std::optional<CyrillicMatch> find_serbian(char32_t cp) noexcept {
  if (cp < 0x0400 || cp > 0x045F)
    return std::nullopt;
  for (const auto &e : serbian_alphabet) {
    if (e.upper == cp)
      return CyrillicMatch{&e, true};
    if (e.lower == cp)
      return CyrillicMatch{&e, false};
  }
  return std::nullopt;
}

/// Lowercase mapping for Basic Latin, Latin-1 Supplement and Latin
/// Extended-A. Returns the input unchanged when it has no mapping.
constexpr char32_t latin_lower(char32_t cp) noexcept {
  if (cp >= U'A' && cp <= U'Z')
    return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
    return cp + 32;
  if (cp == 0x0130)
    return U'i';
  if (cp == 0x0178)
    return 0xFF;
  if ((cp >= 0x0100 && cp <= 0x0137) || (cp >= 0x014A && cp <= 0x0177))
    return (cp % 2 == 0) ? cp + 1 : cp;
  if ((cp >= 0x0139 && cp <= 0x0148) || (cp >= 0x0179 && cp <= 0x017E))
    return (cp % 2 == 1) ? cp + 1 : cp;
  return cp;
}

constexpr bool is_latin_letter(char32_t cp) noexcept {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') ||
         (cp >= 0xC0 && cp <= 0xFF && cp != 0xD7 && cp != 0xF7) ||
         (cp >= 0x0100 && cp <= 0x017F);
}

constexpr bool is_upper_letter(char32_t cp) noexcept {
  if (cp >= 0x0400 && cp <= 0x042F)
    return true;
  return is_latin_letter(cp) && latin_lower(cp) != cp;
}

constexpr bool is_space(char32_t cp) noexcept {
  return cp == U' ' || (cp >= 0x09 && cp <= 0x0D) || cp == 0x85 ||
         cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F ||
         cp == 0x3000;
}

/// Emoticons, pictographs, transport symbols, supplemental symbols, flags,
/// plus the joiners and selectors that glue emoji sequences together.
constexpr bool is_emoji(char32_t cp) noexcept {
  return (cp >= 0x1F600 && cp <= 0x1F64F) || // emoticons
         (cp >= 0x1F300 && cp <= 0x1F5FF) || // misc symbols and pictographs
         (cp >= 0x1F680 && cp <= 0x1F6FF) || // transport and map
         (cp >= 0x1F900 && cp <= 0x1F9FF) || // supplemental symbols
         (cp >= 0x1FA70 && cp <= 0x1FAFF) || // symbols and pictographs ext-a
         (cp >= 0x1F1E6 && cp <= 0x1F1FF) || // regional indicators (flags)
         (cp >= 0x2600 && cp <= 0x27BF) ||   // misc symbols, dingbats
         (cp >= 0x1F000 && cp <= 0x1F2FF) || // mahjong, cards, enclosed
         (cp >= 0xFE00 && cp <= 0xFE0F) || cp == 0x200D || cp == 0x20E3 ||
         (cp >= 0x1F3FB && cp <= 0x1F3FF);
}

constexpr bool is_word_char(char32_t cp) noexcept {
  return is_latin_letter(cp) || (cp >= U'0' && cp <= U'9') || cp == U'_';
}

inline std::u32string decode_all(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  utf8::for_each(s, [&](char32_t cp, std::string_view) { out.push_back(cp); });
  return out;
}

inline bool starts_with_ci(const std::u32string &s, std::size_t pos,
                           std::u32string_view prefix) noexcept {
  if (pos + prefix.size() > s.size())
    return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (latin_lower(s[pos + i]) != prefix[i])
      return false;
  }
  return true;
}

} // namespace detail


/// Serbian Cyrillic to Serbian Latin. Total: malformed UTF-8 bytes and
/// anything outside the Serbian alphabet are copied through untouched.
/// An uppercase digraph letter (Љ, Њ, Џ) becomes all-caps when the next
/// source character is an uppercase letter, title-case otherwise.
inline std::string transliterate(std::string_view text) {
  std::string out;
  out.reserve(text.size() + text.size() / 4);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const utf8::Decoded d = utf8::decode(text, pos);
    const auto match =
        d.cp == utf8::invalid ? std::nullopt : detail::find_serbian(d.cp);
    if (!match) {
      out.append(text.substr(pos, d.length));
      pos += d.length;
      continue;
    }
    pos += d.length;
    const detail::CyrillicEntry &e = *match->entry;
    if (!match->upper) {
      for (char32_t cp : e.latin_lower)
        utf8::append(out, cp);
      continue;
    }
    std::u32string_view latin = e.latin_upper;
    bool all_caps = false;
    if (latin.size() > 1 && pos < text.size()) {
      const utf8::Decoded next = utf8::decode(text, pos);
      all_caps = detail::is_upper_letter(next.cp);
    }
    utf8::append(out, latin[0]);
    for (std::size_t i = 1; i < latin.size(); ++i) {
      const char32_t cp = latin[i];
      // the second letter of Dž is ž (U+017E) whose capital is Ž (U+017D)
      utf8::append(out, all_caps ? (cp == U'ž' ? U'Ž' : cp - 32) : cp);
    }
  }
  return out;
}

/// Strips links, mentions, emoji, '#', digits and punctuation; lowercases
/// and normalizes whitespace. Expects transliterated input. The result
/// contains only lowercase Latin letters separated by single spaces.
inline std::string clean(std::string_view text) {
  const std::u32string in = detail::decode_all(text);
  std::u32string kept;
  kept.reserve(in.size());

  std::size_t i = 0;
  while (i < in.size()) {
    const bool at_url = detail::starts_with_ci(in, i, U"http://") ||
                        detail::starts_with_ci(in, i, U"https://") ||
                        detail::starts_with_ci(in, i, U"www.");
    if (at_url) {
      while (i < in.size() && !detail::is_space(in[i]))
        ++i;
      continue;
    }
    if (in[i] == U'@' && i + 1 < in.size() && detail::is_word_char(in[i + 1])) {
      ++i;
      while (i < in.size() && detail::is_word_char(in[i]))
        ++i;
      continue;
    }
    const char32_t cp = in[i++];
    if (detail::is_emoji(cp) || cp == U'#')
      continue;
    kept.push_back(cp);
  }

  std::string out;
  out.reserve(kept.size());
  bool pending_space = false;
  for (char32_t cp : kept) {
    if (detail::is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (!detail::is_latin_letter(cp))
      continue; // digits, punctuation, symbols, other scripts
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    utf8::append(out, detail::latin_lower(cp));
  }
  return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(' ', start);
    if (end == std::string_view::npos)
      end = text.size();
    if (end > start)
      tokens.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return tokens;
}

inline std::vector<std::string> lemmatize(const std::vector<std::string> &tokens,
                                          const LemmaTable &table) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) {
    const auto it = table.find(t);
    out.push_back(it == table.end() ? t : it->second);
  }
  return out;
}

/// Parses "surface<TAB>lemma" lines. Blank lines are skipped; a repeated
/// surface form overrides the earlier entry.
inline LemmaTable parse_lemma_table(const std::string &content) {
  LemmaTable table;
  const auto lines = io::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string &line = lines[n];
    if (line.empty())
      continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size() ||
        line.find_first_of("\t ", tab + 1) != std::string::npos)
      throw Error(ErrorKind::bad_format,
                  "lemma table line " + std::to_string(n + 1) +
                      ": expected 'surface<TAB>lemma'");
    table[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return table;
}

inline LemmaTable load_lemma_table(const std::string &path) {
  return parse_lemma_table(io::read_file(path));
}

inline CleanDocument preprocess_document(const RawDocument &doc,
                                         PreprocessLevel level,
                                         const LemmaTable *table) {
  CleanDocument out;
  out.id = doc.id;
  out.tokens = tokenize(clean(transliterate(doc.text)));
  if (level == PreprocessLevel::full)
    out.tokens = lemmatize(out.tokens, *table);
  out.empty = out.tokens.empty();
  return out;
}

inline CleanCorpus preprocess_corpus(const std::vector<RawDocument> &docs,
                                     PreprocessLevel level,
                                     const LemmaTable *table) {
  if (level == PreprocessLevel::full && table == nullptr)
    throw Error(ErrorKind::missing_table,
                "full preprocessing requires a lemma table");
  std::unordered_set<std::string_view> seen;
  CleanCorpus corpus;
  corpus.level = level;
  corpus.documents.reserve(docs.size());
  for (const auto &doc : docs) {
    if (!seen.insert(doc.id).second)
      throw Error(ErrorKind::duplicate_id, "document id '" + doc.id + "'");
    corpus.documents.push_back(preprocess_document(doc, level, table));
  }
  return corpus;
}

/// Loads the lemma table named by `cfg` when the level needs one.
inline CleanCorpus preprocess_corpus(const std::vector<RawDocument> &docs,
                                     const PreprocessConfig &cfg) {
  if (cfg.level == PreprocessLevel::partial)
    return preprocess_corpus(docs, cfg.level, nullptr);
  if (!cfg.lemma_table_path)
    throw Error(ErrorKind::missing_table,
                "full preprocessing requires a lemma table");
  const LemmaTable table = load_lemma_table(*cfg.lemma_table_path);
  return preprocess_corpus(docs, cfg.level, &table);
}

/// One document per line with an optional "id<TAB>" prefix. Lines without
/// a tab are given the id "d<line index>".
inline std::vector<RawDocument> parse_raw_corpus(const std::string &content) {
  std::vector<RawDocument> docs;
  const auto lines = io::split_lines(content);
  docs.reserve(lines.size());
  std::unordered_set<std::string> seen;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string &line = lines[n];
    RawDocument doc;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      doc.id = "d" + std::to_string(n);
      doc.text = line;
    } else {
      doc.id = line.substr(0, tab);
      doc.text = line.substr(tab + 1);
    }
    if (!seen.insert(doc.id).second)
      throw Error(ErrorKind::duplicate_id,
                  "document id '" + doc.id + "' on line " +
                      std::to_string(n + 1));
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline std::vector<RawDocument> read_raw_corpus(const std::string &path) {
  return parse_raw_corpus(io::read_file(path));
}

/// "id<TAB>token token ..." per line.
inline std::string format_clean_corpus(const CleanCorpus &corpus) {
  std::string out;
  for (const auto &doc : corpus.documents) {
    out += doc.id;
    out += '\t';
    for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
      if (i)
        out += ' ';
      out += doc.tokens[i];
    }
    out += '\n';
  }
  return out;
}

inline CleanCorpus parse_clean_corpus(const std::string &content,
                                      PreprocessLevel level) {
  CleanCorpus corpus;
  corpus.level = level;
  const auto lines = io::split_lines(content);
  std::unordered_set<std::string> seen;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string &line = lines[n];
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(ErrorKind::bad_format, "clean corpus line " +
                                             std::to_string(n + 1) +
                                             ": missing tab after id");
    CleanDocument doc;
    doc.id = line.substr(0, tab);
    doc.tokens = tokenize(std::string_view(line).substr(tab + 1));
    doc.empty = doc.tokens.empty();
    if (!seen.insert(doc.id).second)
      throw Error(ErrorKind::duplicate_id, "document id '" + doc.id + "'");
    corpus.documents.push_back(std::move(doc));
  }
  return corpus;
}

} // namespace topicmod

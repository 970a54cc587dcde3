#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "topicmod/preprocess.hpp"
#include "topicmod/random.hpp"
#include "topicmod/utf8.hpp"

namespace {

using namespace topicmod;

// Serbian Cyrillic alphabet and its Latin counterpart, in alphabet order.
const std::vector<std::pair<std::string, std::string>> kAlphabet = {
    {"а", "a"},  {"б", "b"}, {"в", "v"},  {"г", "g"}, {"д", "d"}, {"ђ", "đ"},
    {"е", "e"},  {"ж", "ž"}, {"з", "z"},  {"и", "i"}, {"ј", "j"}, {"к", "k"},
    {"л", "l"},  {"љ", "lj"}, {"м", "m"}, {"н", "n"}, {"њ", "nj"}, {"о", "o"},
    {"п", "p"},  {"р", "r"}, {"с", "s"},  {"т", "t"}, {"ћ", "ć"}, {"у", "u"},
    {"ф", "f"},  {"х", "h"}, {"ц", "c"},  {"ч", "č"}, {"џ", "dž"}, {"ш", "š"},
};

const std::vector<std::pair<std::string, std::string>> kAlphabetUpper = {
    {"А", "A"},  {"Б", "B"}, {"В", "V"},  {"Г", "G"}, {"Д", "D"}, {"Ђ", "Đ"},
    {"Е", "E"},  {"Ж", "Ž"}, {"З", "Z"},  {"И", "I"}, {"Ј", "J"}, {"К", "K"},
    {"Л", "L"},  {"Љ", "Lj"}, {"М", "M"}, {"Н", "N"}, {"Њ", "Nj"}, {"О", "O"},
    {"П", "P"},  {"Р", "R"}, {"С", "S"},  {"Т", "T"}, {"Ћ", "Ć"}, {"У", "U"},
    {"Ф", "F"},  {"Х", "H"}, {"Ц", "C"},  {"Ч", "Č"}, {"Џ", "Dž"}, {"Ш", "Š"},
};

TEST(Transliterate, Examples) {
  EXPECT_EQ(transliterate("вакцина"), "vakcina");
  EXPECT_EQ(transliterate("Џак"), "Džak");
  EXPECT_EQ(transliterate("ЉУБАВ"), "LJUBAV");
  EXPECT_EQ(transliterate("covid19 вакцина"), "covid19 vakcina");
}

TEST(Transliterate, FullAlphabetTable) {
  for (const auto &[cyr, lat] : kAlphabet)
    EXPECT_EQ(transliterate(cyr), lat) << cyr;
  for (const auto &[cyr, lat] : kAlphabetUpper)
    EXPECT_EQ(transliterate(cyr), lat) << cyr;
}

TEST(Transliterate, DigraphCaseFollowsNextLetter) {
  EXPECT_EQ(transliterate("ЊЕГОШ"), "NJEGOŠ");
  EXPECT_EQ(transliterate("Његош"), "Njegoš");
  EXPECT_EQ(transliterate("ЏЏ"), "DŽDž");
  EXPECT_EQ(transliterate("Џ"), "Dž");
  EXPECT_EQ(transliterate("Џ!"), "Dž!");
  // a following uppercase Latin letter also counts
  EXPECT_EQ(transliterate("ЉX"), "LJX");
}

TEST(Transliterate, NonSerbianPassesThrough) {
  EXPECT_EQ(transliterate(""), "");
  EXPECT_EQ(transliterate("Ђoković ✓ ы ё"), "Đoković ✓ ы ё");
  const std::string malformed = "a\xff\xc3 б";
  EXPECT_EQ(transliterate(malformed), "a\xff\xc3 b");
}

TEST(Transliterate, IdempotentOnFuzzedMixedScript) {
  std::vector<std::string> pool;
  for (const auto &[c, l] : kAlphabet) {
    pool.push_back(c);
    pool.push_back(l);
  }
  for (const auto &[c, l] : kAlphabetUpper) {
    pool.push_back(c);
    pool.push_back(l);
  }
  for (const char *s : {" ", "  ", "1", "9", ".", "!", "#", "@", "ё", "ы", "😀", "\t", "Ä", "ß"})
    pool.push_back(s);

  Rng rng(20240607);
  for (int trial = 0; trial < 10000; ++trial) {
    std::string s;
    const auto len = rng.below(24);
    for (std::uint64_t i = 0; i < len; ++i)
      s += pool[rng.below(pool.size())];
    const std::string once = transliterate(s);
    ASSERT_EQ(transliterate(once), once) << s;
  }
}

TEST(Clean, Examples) {
  EXPECT_EQ(clean("Pogledaj https://t.co/xyz @marko #StopVakcinaciji!!!"),
            "pogledaj stopvakcinaciji");
  EXPECT_EQ(clean(""), "");
  EXPECT_EQ(clean("Vakcina 2021."), "vakcina");
}

TEST(Clean, LinksMentionsEmoji) {
  EXPECT_EQ(clean("vidi WWW.Example.com/x sad"), "vidi sad");
  EXPECT_EQ(clean("HTTP://A.B ok"), "ok");
  EXPECT_EQ(clean("pozdrav @ana_1, kako si"), "pozdrav kako si");
  EXPECT_EQ(clean("mail @ nikome"), "mail nikome");
  EXPECT_EQ(clean("super😀🚀👍🏽 dan 🇷🇸"), "super dan");
  EXPECT_EQ(clean("ŠTA ĆE ĐAK ČITATI ŽUTO"), "šta će đak čitati žuto");
}

TEST(Clean, OutputCharacterClassInvariant) {
  std::vector<std::string> pool = {"a", "Z", "š", "Č", "đ", "1", "0", ".", ",", "!", "?", "-",
                                   "'", "\"", " ", "  ", "\t", "\n", "#", "@", "😀", "✓",
                                   "http://x.y", "www.z", "é", "ß", "ы", "€", "_", "(", "\xff"};
  Rng rng(7);
  for (int trial = 0; trial < 5000; ++trial) {
    std::string s;
    const auto len = rng.below(30);
    for (std::uint64_t i = 0; i < len; ++i)
      s += pool[rng.below(pool.size())];
    const std::string out = clean(transliterate(s));
    ASSERT_TRUE(out.empty() || (out.front() != ' ' && out.back() != ' ')) << s;
    ASSERT_EQ(out.find("  "), std::string::npos) << s;
    utf8::for_each(out, [&](char32_t cp, std::string_view) {
      const bool lower_letter = detail::is_latin_letter(cp) && !detail::is_upper_letter(cp);
      ASSERT_TRUE(cp == U' ' || lower_letter) << s << " -> U+" << std::hex << int(cp);
    });
  }
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("pogledaj stopvakcinaciji"),
            (std::vector<std::string>{"pogledaj", "stopvakcinaciji"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("a b a"), (std::vector<std::string>{"a", "b", "a"}));
}

TEST(Lemmatize, Examples) {
  const LemmaTable table{{"dece", "dete"}, {"deci", "dete"}};
  EXPECT_EQ(lemmatize({"dece", "deci"}, table), (std::vector<std::string>{"dete", "dete"}));
  EXPECT_EQ(lemmatize({"vakcina"}, LemmaTable{}), (std::vector<std::string>{"vakcina"}));
  EXPECT_TRUE(lemmatize({}, table).empty());
}

TEST(LemmaTable, ParsesAndLastEntryWins) {
  const auto t = parse_lemma_table("dece\tdete\n\nkuce\tkuca\r\ndece\tdeca\n");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("dece"), "deca");
  EXPECT_EQ(t.at("kuce"), "kuca");
}

TEST(LemmaTable, RejectsMalformedLines) {
  for (const char *bad : {"nolemma\n", "\tx\n", "a\t\n", "a\tb c\n", "a\tb\tc\n"}) {
    try {
      parse_lemma_table(bad);
      FAIL() << bad;
    } catch (const Error &e) {
      EXPECT_EQ(e.kind(), ErrorKind::bad_format);
    }
  }
}

TEST(PreprocessCorpus, PartialComposesStages) {
  const std::vector<RawDocument> docs = {{"t1", "Деца и ВАКЦИНА 2021! https://x.y @dr_z"}};
  const CleanCorpus c = preprocess_corpus(docs, PreprocessLevel::partial, nullptr);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.documents[0].id, "t1");
  EXPECT_EQ(c.documents[0].tokens, (std::vector<std::string>{"deca", "i", "vakcina"}));
  EXPECT_FALSE(c.documents[0].empty);
}

TEST(PreprocessCorpus, FullAppliesLemmasOnly) {
  const std::vector<RawDocument> docs = {{"t1", "Деци и деце"}, {"t2", "ништа"}};
  const LemmaTable table{{"deci", "dete"}, {"dece", "dete"}};
  const CleanCorpus partial = preprocess_corpus(docs, PreprocessLevel::partial, nullptr);
  const CleanCorpus full = preprocess_corpus(docs, PreprocessLevel::full, &table);
  EXPECT_EQ(full.level, PreprocessLevel::full);
  EXPECT_EQ(full.documents[0].tokens, (std::vector<std::string>{"dete", "i", "dete"}));
  EXPECT_EQ(full.documents[1].tokens, partial.documents[1].tokens);
}

TEST(PreprocessCorpus, FullWithoutTableIsMissingTable) {
  try {
    preprocess_corpus({{"a", "x"}}, PreprocessLevel::full, nullptr);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::missing_table);
    EXPECT_NE(std::string(e.what()).find("MissingTable"), std::string::npos);
  }
  PreprocessConfig cfg;
  cfg.level = PreprocessLevel::full;
  EXPECT_THROW(preprocess_corpus({{"a", "x"}}, cfg), Error);
}

TEST(PreprocessCorpus, PunctuationOnlyDocumentIsFlaggedEmpty) {
  const CleanCorpus c =
      preprocess_corpus({{"a", "!!! ... 123"}, {"b", "reč"}}, PreprocessLevel::partial, nullptr);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_TRUE(c.documents[0].empty);
  EXPECT_TRUE(c.documents[0].tokens.empty());
  EXPECT_FALSE(c.documents[1].empty);
}

TEST(PreprocessCorpus, PreservesCountAndOrderAndRejectsDuplicates) {
  std::vector<RawDocument> docs;
  for (int i = 9; i >= 0; --i)
    docs.push_back({"id" + std::to_string(i), "tekst " + std::to_string(i)});
  const CleanCorpus c = preprocess_corpus(docs, PreprocessLevel::partial, nullptr);
  ASSERT_EQ(c.size(), docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i)
    EXPECT_EQ(c.documents[i].id, docs[i].id);
  docs.push_back({"id3", "dup"});
  EXPECT_THROW(preprocess_corpus(docs, PreprocessLevel::partial, nullptr), Error);
}

TEST(CorpusFiles, RawIdsAndCleanRoundTrip) {
  const auto raw = parse_raw_corpus("first line\nx7\tsecond\r\n\nthird");
  ASSERT_EQ(raw.size(), 4u);
  EXPECT_EQ(raw[0].id, "d0");
  EXPECT_EQ(raw[1].id, "x7");
  EXPECT_EQ(raw[1].text, "second");
  EXPECT_EQ(raw[2].id, "d2");
  EXPECT_EQ(raw[3].id, "d3");

  const CleanCorpus c = preprocess_corpus(raw, PreprocessLevel::partial, nullptr);
  const std::string text = format_clean_corpus(c);
  const CleanCorpus back = parse_clean_corpus(text, PreprocessLevel::partial);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.documents[i].id, c.documents[i].id);
    EXPECT_EQ(back.documents[i].tokens, c.documents[i].tokens);
    EXPECT_EQ(back.documents[i].empty, c.documents[i].empty);
  }
  EXPECT_EQ(format_clean_corpus(back), text);
}

} // namespace

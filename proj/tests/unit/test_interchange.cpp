#include <gtest/gtest.h>

#include "iebench/error.hpp"
#include "iebench/interchange.hpp"
#include "iebench/text.hpp"
#include "test_support.hpp"

using namespace iebench;
using iebench::testutil::data_dir;
using iebench::testutil::TempDir;
using iebench::testutil::write_file;

namespace {

const LabelVocabulary& vocab() {
  static const LabelVocabulary v = LabelVocabulary::defaults();
  return v;
}

AdapterInput input(std::string content) { return AdapterInput{std::move(content), "mem", "1401.0001", 0, 0}; }

using Units = std::vector<std::vector<std::string>>;

constexpr const char* kTei = R"(<?xml version="1.0" encoding="UTF-8"?>
<TEI xmlns="http://www.tei-c.org/ns/1.0">
  <teiHeader>
    <fileDesc>
      <titleStmt><title level="a" type="main">A Retrieval of Web Comparison</title></titleStmt>
      <sourceDesc><biblStruct><analytic>
        <author><persName><forename>Yuta</forename><surname>Hamada</surname></persName></author>
        <author><persName><forename>Gary</forename><surname>Shiu</surname></persName></author>
      </analytic></biblStruct></sourceDesc>
    </fileDesc>
    <profileDesc><abstract><p>We evaluate <hi>ten</hi> tools.</p></abstract></profileDesc>
  </teiHeader>
  <text><back><div type="references"><listBibl>
    <biblStruct><analytic><title>Nested &amp; inner</title></analytic><monogr><title>Journal</title></monogr></biblStruct>
    <biblStruct><monogr><title>Second</title></monogr></biblStruct>
  </listBibl></div></back></text>
</TEI>
)";

}  // namespace

TEST(AdapterConfig, ParsesAndCanonicalizes) {
  const auto config = parse_adapter_config(R"({
    "tool": "grobid", "format": "xml", "scope": "page", "path_template": "{doc}/{page}.tei.xml",
    "selectors": {"title": "//titleStmt/title", "author": {"path": "//analytic/author", "text_field": ""}}
  })", vocab());
  EXPECT_EQ(config.tool, "grobid");
  EXPECT_EQ(config.format, AdapterFormat::xml);
  EXPECT_EQ(config.selectors.size(), 2u);
  EXPECT_EQ(config.selector_for(ContentLabel("title")).path, "//titleStmt/title");
  EXPECT_THROW(config.selector_for(ContentLabel("table")), ConfigError);
  EXPECT_EQ(config.canonical_json(), parse_adapter_config(config.canonical_json(), vocab()).canonical_json());
}

TEST(AdapterConfig, RejectsInvalidDocuments) {
  EXPECT_THROW(parse_adapter_config("{", vocab()), JsonParseError);
  EXPECT_THROW(parse_adapter_config(R"({"tool":"t","format":"pdf","path_template":"{doc}","selectors":{"title":"x"}})",
                                    vocab()),
               ConfigError);
  EXPECT_THROW(parse_adapter_config(R"({"tool":"t","format":"json","path_template":"{doc}","selectors":{"heading":"x"}})",
                                    vocab()),
               ConfigError);
  EXPECT_THROW(parse_adapter_config(R"({"tool":"t","format":"csv","path_template":"{doc}","selectors":{"title":"*"}})",
                                    vocab()),
               ConfigError);
  EXPECT_THROW(parse_adapter_config(R"({"tool":"t","format":"text","path_template":"{doc}","selectors":{"title":"lines:3-1"}})",
                                    vocab()),
               ConfigError);
  EXPECT_THROW(parse_adapter_config(R"({"format_version":2,"tool":"t","format":"json","path_template":"{doc}","selectors":{"title":"x"}})",
                                    vocab()),
               ConfigError);
  EXPECT_THROW(parse_adapter_config(R"({"tool":"t","format":"json","scope":"document","path_template":"{doc}_{page}","selectors":{"title":"x"}})",
                                    vocab()),
               ConfigError);
}

TEST(AdapterConfig, LintFindsDuplicateKeysAndSharedSelectors) {
  const auto dup = lint_adapter_config(
      R"({"tool":"t","format":"json","path_template":"{doc}","selectors":{"title":"a","title":"b"}})", vocab());
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_NE(dup[0].find("duplicate key 'title'"), std::string::npos);

  const auto shared = lint_adapter_config(
      R"({"tool":"t","format":"json","path_template":"{doc}","selectors":{"title":"a","abstract":"a"}})", vocab());
  ASSERT_EQ(shared.size(), 1u);

  const auto many = lint_adapter_config(R"({"format":"pdf","selectors":{}})", vocab());
  EXPECT_GE(many.size(), 3u);

  EXPECT_TRUE(lint_adapter_config(testutil::slurp(data_dir() / "golden/adapter.json"), vocab()).empty());
}

TEST(XmlAdapter, TeiHeaderSelectors) {
  const auto title = extract_xml(input(kTei), {"/TEI/teiHeader//titleStmt/title[@type='main']", ""},
                                 ContentLabel("title"), "grobid");
  EXPECT_EQ(title.tokens, (std::vector<std::string>{"A", "Retrieval", "of", "Web", "Comparison"}));
  EXPECT_FALSE(title.selector_miss);

  const auto authors = extract_xml(input(kTei), {"//analytic/author", ""}, ContentLabel("author"), "grobid");
  EXPECT_EQ(authors.units(), (Units{{"Yuta", "Hamada"}, {"Gary", "Shiu"}}));

  // Inline markup splits text nodes but not words' order.
  const auto abstract = extract_xml(input(kTei), {"//abstract", ""}, ContentLabel("abstract"), "grobid");
  EXPECT_EQ(abstract.tokens, (std::vector<std::string>{"We", "evaluate", "ten", "tools."}));
}

TEST(XmlAdapter, OutermostMatchOnlyAndEntities) {
  const auto refs = extract_xml(input(kTei), {"//listBibl/biblStruct", ""}, ContentLabel("reference"), "grobid");
  EXPECT_EQ(refs.units(), (Units{{"Nested", "&", "inner", "Journal"}, {"Second"}}));

  // //title matches the header title and both reference titles.
  const auto titles = extract_xml(input(kTei), {"//title", ""}, ContentLabel("title"), "grobid");
  EXPECT_EQ(titles.unit_sizes.size(), 4u);
}

TEST(XmlAdapter, MissAndMalformed) {
  const auto miss = extract_xml(input(kTei), {"//figure", ""}, ContentLabel("figure"), "grobid");
  EXPECT_TRUE(miss.selector_miss);
  EXPECT_TRUE(miss.tokens.empty());
  EXPECT_THROW(extract_xml(input("<a><b></a>"), {"//b", ""}, ContentLabel("title"), "t"), XmlParseError);
  EXPECT_THROW(extract_xml(input(""), {"//b", ""}, ContentLabel("title"), "t"), XmlParseError);
}

TEST(XmlAdapter, JatsDoctypeAndPrefixedNames) {
  const std::string jats = R"(<?xml version="1.0"?>
<!DOCTYPE article PUBLIC "-//NLM//DTD JATS (Z39.96) Journal Archiving DTD v1.0 20120330//EN" "JATS-archivearticle1.dtd">
<article xmlns:xlink="http://www.w3.org/1999/xlink"><front><article-meta>
<title-group><article-title>Deep Tables</article-title></title-group>
<contrib-group><contrib><name><surname>Lee</surname><given-names>A.</given-names></name></contrib></contrib-group>
</article-meta></front><back><ref-list><ref><mixed-citation>[2] B. Writer</mixed-citation></ref></ref-list></back></article>)";
  EXPECT_EQ(extract_xml(input(jats), {"//article-title", ""}, ContentLabel("title"), "cermine").tokens,
            (std::vector<std::string>{"Deep", "Tables"}));
  EXPECT_EQ(extract_xml(input(jats), {"//ref-list/ref", ""}, ContentLabel("reference"), "cermine").tokens,
            (std::vector<std::string>{"[2]", "B.", "Writer"}));
  EXPECT_EQ(extract_xml(input("<tei:TEI xmlns:tei='x'><tei:title>T</tei:title></tei:TEI>"), {"//title", ""},
                        ContentLabel("title"), "t")
                .tokens,
            (std::vector<std::string>{"T"}));
}

TEST(JsonAdapter, PathsMapOverArrays) {
  const std::string doc = R"({"metadata":{"title":"Deep Tables","authors":[{"name":"A. Lee"},{"name":"B. Kim"}],
    "references":["[1] X", "[2] Y"], "year": 2020, "empty": null}})";
  EXPECT_EQ(extract_json(input(doc), {"metadata.title", ""}, ContentLabel("title"), "sp").tokens,
            (std::vector<std::string>{"Deep", "Tables"}));
  EXPECT_EQ(extract_json(input(doc), {"metadata.authors", "name"}, ContentLabel("author"), "sp").units(),
            (Units{{"A.", "Lee"}, {"B.", "Kim"}}));
  EXPECT_EQ(extract_json(input(doc), {"metadata.references", ""}, ContentLabel("reference"), "sp").unit_sizes,
            (std::vector<std::size_t>{2, 2}));
  EXPECT_TRUE(extract_json(input(doc), {"metadata.abstract", ""}, ContentLabel("abstract"), "sp").selector_miss);
  EXPECT_TRUE(extract_json(input(doc), {"metadata.empty", ""}, ContentLabel("abstract"), "sp").selector_miss);
}

TEST(JsonAdapter, TypeErrors) {
  const std::string doc = R"({"year": 2020, "meta": {"a": 1}, "title": "x"})";
  EXPECT_THROW(extract_json(input(doc), {"year", ""}, ContentLabel("title"), "t"), PathTypeError);
  EXPECT_THROW(extract_json(input(doc), {"meta", ""}, ContentLabel("title"), "t"), PathTypeError);
  EXPECT_THROW(extract_json(input(doc), {"title.inner", ""}, ContentLabel("title"), "t"), PathTypeError);
  EXPECT_THROW(extract_json(input("{"), {"title", ""}, ContentLabel("title"), "t"), JsonParseError);
}

TEST(CsvAdapter, Rfc4180Quoting) {
  const auto rows = parse_csv("a,\"b,c\",\"say \"\"hi\"\"\"\r\n1,,\"multi\nline\"\n\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"a", "b,c", "say \"hi\""}));
  EXPECT_EQ(rows[1], (std::vector<std::string>{"1", "", "multi\nline"}));
  EXPECT_EQ(parse_csv("x,y").size(), 1u);
  EXPECT_THROW(parse_csv("\"open"), CsvParseError);
  EXPECT_THROW(parse_csv("a\"b\n"), CsvParseError);
  EXPECT_THROW(parse_csv("\"a\"b\n"), CsvParseError);
}

TEST(CsvAdapter, TableRowsBecomeUnits) {
  const auto table = extract_table_csv(input("Method,F1\nGROBID,0.91\n"), "camelot");
  EXPECT_EQ(table.label.name(), "table");
  EXPECT_EQ(table.units(), (Units{{"Method", "F1"}, {"GROBID", "0.91"}}));
  EXPECT_TRUE(extract_table_csv(input(""), "camelot").selector_miss);
}

TEST(TextAdapter, LineRanges) {
  const auto all = extract_plaintext(input("[1] One\n\n[2] Two\n[3] Three\n"), {"all", ""}, ContentLabel("reference"), "re");
  EXPECT_EQ(all.units(), (Units{{"[1]", "One"}, {"[2]", "Two"}, {"[3]", "Three"}}));
  const auto some = extract_plaintext(input("a\nb\nc\nd\n"), {"lines:2-3", ""}, ContentLabel("paragraph"), "t");
  EXPECT_EQ(some.tokens, (std::vector<std::string>{"b", "c"}));
  const auto tail = extract_plaintext(input("a\nb\nc\n"), {"lines:3-", ""}, ContentLabel("paragraph"), "t");
  EXPECT_EQ(tail.tokens, (std::vector<std::string>{"c"}));
  EXPECT_TRUE(extract_plaintext(input("a\n"), {"lines:5-", ""}, ContentLabel("paragraph"), "t").selector_miss);
  EXPECT_TRUE(extract_plaintext(input(""), {"all", ""}, ContentLabel("paragraph"), "t").selector_miss);
}

TEST(RecordsAdapter, JsonlRoundTrip) {
  ExtractionRecord a;
  a.tool = "t";
  a.document_id = "1401.0001";
  a.page = 0;
  a.label = ContentLabel("author");
  a.add_unit({"Yuta", "Hamada"});
  a.add_unit({"Gary"});
  ExtractionRecord other = a;
  other.document_id = "1402.0002";

  TempDir dir;
  write_records_jsonl({a, other}, dir / "dump.jsonl");
  const auto in = read_adapter_input(dir / "dump.jsonl", "1401.0001", 0);
  const auto back = extract_records(in, ContentLabel("author"), "t");
  EXPECT_EQ(back.tokens, a.tokens);
  EXPECT_EQ(back.unit_sizes, a.unit_sizes);
  EXPECT_TRUE(extract_records(in, ContentLabel("title"), "t").selector_miss);
  EXPECT_EQ(to_jsonl(a),
            R"({"tool":"t","doc":"1401.0001","page":0,"label":"author","tokens":["Yuta","Hamada","Gary"],"units":[2,1]})");
}

TEST(Adapters, FileLevelEntryPoints) {
  TempDir dir;
  write_file(dir / "out.json", R"({"title":"Deep Tables"})");
  const auto config = parse_adapter_config(
      R"({"tool":"sp","format":"json","path_template":"{doc}.json","selectors":{"title":"title"}})", vocab());
  const auto record = parse_json_extraction(dir / "out.json", config, ContentLabel("title"), "1402.0002", 0);
  EXPECT_EQ(record.tokens.size(), 2u);
  EXPECT_EQ(record.document_id, "1402.0002");
  EXPECT_THROW(parse_xml_extraction(dir / "out.json", config, ContentLabel("title"), "1402.0002"), ConfigError);
  EXPECT_THROW(parse_json_extraction(dir / "missing.json", config, ContentLabel("title"), "1402.0002"), IoError);

  write_file(dir / "t.csv", "1,2\n");
  EXPECT_EQ(parse_table_csv(dir / "t.csv").tokens.size(), 2u);
}

TEST(Adapters, InvalidUtf8IsCounted) {
  TempDir dir;
  write_file(dir / "bad.txt", "caf\xe9 au lait\n");
  const auto config = parse_adapter_config(
      R"({"tool":"t","format":"text","path_template":"{doc}.txt","selectors":{"paragraph":"all"}})", vocab());
  const auto record = parse_plaintext(dir / "bad.txt", config, ContentLabel("paragraph"), "1401.0001");
  EXPECT_EQ(record.replaced_bytes, 1u);
  EXPECT_EQ(record.tokens.front(), "caf\xef\xbf\xbd");
}

TEST(RestrictToGroundTruth, KeepsOnlyUnitsCoveredByThePage) {
  ExtractionRecord doc;
  doc.label = ContentLabel("reference");
  doc.add_unit({"[1]", "J.", "Smith,", "Graph", "theory,", "2001."});
  doc.add_unit({"[3]", "L.", "Brown,", "Deep", "learning,", "2016."});
  doc.add_unit({"[2]", "K.", "Jones,", "Linear", "algebra,", "1999."});
  const TokenSequence page_gt({"[1]", "J.", "Smith,", "Graph", "theory,", "2001.", "[2]", "K.", "Jones,", "Linear",
                               "algebra,", "1999."});
  const auto restricted = restrict_to_ground_truth(doc, page_gt);
  EXPECT_EQ(restricted.units(), (Units{{"[1]", "J.", "Smith,", "Graph", "theory,", "2001."},
                                       {"[2]", "K.", "Jones,", "Linear", "algebra,", "1999."}}));
  EXPECT_TRUE(restrict_to_ground_truth(doc, TokenSequence()).tokens.empty());
}

TEST(Presets, AllLintCleanAndParse) {
  const auto dir = data_dir().parent_path().parent_path() / "presets";
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    SCOPED_TRACE(entry.path().string());
    const std::string text = iebench::read_file(entry.path().string());
    EXPECT_TRUE(lint_adapter_config(text, vocab()).empty());
    EXPECT_NO_THROW(load_adapter_config(entry.path(), vocab()));
    ++count;
  }
  EXPECT_EQ(count, 5u);
}

#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "evograph/alias.hpp"
#include "evograph/types.hpp"

using namespace evograph;

namespace {

AliasRegistry demo_registry() {
  AliasRegistry reg;
  reg.add("m1", {"ResNet", "residual network"});
  reg.add("m2", {"ResNeXt"});
  reg.add("m3", {"BERT"});
  reg.add_negative("the model", "generic");
  return reg;
}

}  // namespace

TEST_CASE("exact match normalizes before lookup") {
  AliasRegistry reg = demo_registry();
  CHECK(reg.exact_match("resnet") == NodeId("m1"));
  CHECK(reg.exact_match("  Residual-Network ") == NodeId("m1"));
  CHECK(reg.exact_match("bert") == NodeId("m3"));
  CHECK_FALSE(reg.exact_match("unknown thing").has_value());
  CHECK_FALSE(reg.exact_match("the model").has_value());  // negative-listed
}

TEST_CASE("one surface cannot map to two methods") {
  AliasRegistry reg;
  reg.add("m1", {"ResNet"});
  CHECK_THROWS_AS(reg.add("m2", {" RESNET. "}), UniquenessError);  // same normalized form
  reg.add("m1", {"ResNet"});  // re-registering for the same owner is fine
  CHECK_THROWS_AS(reg.add("m2", {"   "}), ParseError);  // empty after normalization
}

TEST_CASE("mention resolution finds non-overlapping longest matches") {
  AliasRegistry reg = demo_registry();
  std::string text = "We train a Residual Network head; ResNeXt and BERT follow.";
  auto mentions = resolve_mentions(text, reg);
  REQUIRE(mentions.size() == 3);
  CHECK(mentions[0].method == "m1");
  CHECK(mentions[0].surface == "residual network");
  CHECK(mentions[1].method == "m2");
  CHECK(mentions[2].method == "m3");
  // Spans are ordered, within bounds and non-overlapping on raw bytes.
  for (size_t i = 0; i < mentions.size(); ++i) {
    CHECK(mentions[i].begin < mentions[i].end);
    CHECK(mentions[i].end <= text.size());
    if (i) CHECK(mentions[i - 1].end <= mentions[i].begin);
  }
  CHECK(text.substr(mentions[0].begin, mentions[0].end - mentions[0].begin) ==
        "Residual Network");
}

TEST_CASE("longer surface wins where registrations overlap") {
  AliasRegistry reg;
  reg.add("short", {"graph"});
  reg.add("long", {"graph attention network"});
  auto mentions = resolve_mentions("a graph attention network layer", reg);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].method == "long");
}

TEST_CASE("word boundaries block substring hits") {
  AliasRegistry reg;
  reg.add("m1", {"GAN"});
  auto mentions = resolve_mentions("elegant gannets organize; a GAN trains", reg);
  REQUIRE(mentions.size() == 1);  // only the standalone token
  CHECK(mentions[0].method == "m1");
}

TEST_CASE("version suffixes extend a mention span") {
  AliasRegistry reg;
  reg.add("m1", {"BERT"});
  std::string text = "We fine-tune BERT large on squad.";
  auto mentions = resolve_mentions(text, reg);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].method == "m1");
  CHECK(text.substr(mentions[0].begin, mentions[0].end - mentions[0].begin) ==
        "BERT large");
}

TEST_CASE("negative list suppresses resolution even when registered") {
  AliasRegistry reg;
  reg.add("m1", {"transformer"});
  reg.add_negative("transformer");
  CHECK(resolve_mentions("the transformer model", reg).empty());
  CHECK_FALSE(reg.exact_match("Transformer").has_value());
}

TEST_CASE("registry json round-trips") {
  AliasRegistry reg = demo_registry();
  AliasRegistry again = AliasRegistry::from_json(reg.to_json(), "roundtrip");
  CHECK(again.to_json() == reg.to_json());
  CHECK(again.exact_match("resnext") == NodeId("m2"));

  nlohmann::json conflict = {{"m1", {"ResNet"}}, {"m2", {"resnet"}}};
  CHECK_THROWS_AS(AliasRegistry::from_json(conflict, "conflict"), UniquenessError);
}

TEST_CASE("resolution is deterministic across repeated runs") {
  AliasRegistry reg = demo_registry();
  std::string text = "ResNet beats residual network variants; BERT and ResNeXt tie.";
  auto a = resolve_mentions(text, reg);
  auto b = resolve_mentions(text, reg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].begin == b[i].begin);
    CHECK(a[i].end == b[i].end);
  }
}

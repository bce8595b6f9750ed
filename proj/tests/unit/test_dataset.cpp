#include <doctest.h>

#include <string>

#include "hnirm/dataset.hpp"
#include "hnirm/rng.hpp"

using namespace hnirm;

namespace {

const std::string kWideCsv =
    "respondent_id,school_id,item_1,item_2,item_3\n"
    "r1,sB,1,2,3\n"
    "r2,sB,4,5,1\n"
    "r3,sA,5,5,5\n"
    "r4,sA,1,1,2\n";

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("wide CSV: 4 respondents x 3 items, 2 schools") {
  const auto ds = load_responses_text(kWideCsv, CsvFormat::Wide);
  CHECK(ds.n_schools() == 2);
  CHECK(ds.n_items() == 3);
  CHECK(ds.n_in_school(0) == 2);
  CHECK(ds.n_in_school(1) == 2);
  CHECK(ds.dropped_count == 0);
  // sorted by school then respondent id
  CHECK(ds.school_ids[0] == "sA");
  CHECK(ds.respondents[0].id == "r3");
  CHECK(ds.respondents[2].id == "r1");
  CHECK(ds.respondents[2].codes == std::vector<int>{1, 2, 3});
}

TEST_CASE("missing item drops the respondent and counts it") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2,item_3\n"
      "r1,sA,1,2,\n"
      "r2,sA,4,5,1\n"
      "r3,sA,5,5,5\n";
  const auto ds = load_responses_text(csv, CsvFormat::Wide);
  CHECK(ds.dropped_count == 1);
  CHECK(ds.n_in_school(0) == 2);
}

TEST_CASE("duplicated respondent_id within a school is a validation error") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,1,2\n"
      "r1,sA,3,4\n"
      "r2,sA,1,1\n";
  CHECK_THROWS_AS(load_responses_text(csv, CsvFormat::Wide), ValidationError);
}

TEST_CASE("same respondent in two schools is a validation error") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,1,2\n"
      "r1,sB,3,4\n"
      "r2,sA,1,1\n"
      "r3,sB,1,1\n";
  CHECK_THROWS_AS(load_responses_text(csv, CsvFormat::Wide), ValidationError);
}

TEST_CASE("malformed code reports the line number") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,1,2\n"
      "r2,sA,oops,4\n";
  try {
    load_responses_text(csv, CsvFormat::Wide, "input.csv");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("input.csv:3") != std::string::npos);
  }
}

TEST_CASE("school reduced below two respondents is a validation error") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,1,\n"
      "r2,sA,3,4\n"
      "r3,sB,1,1\n"
      "r4,sB,2,2\n";
  CHECK_THROWS_AS(load_responses_text(csv, CsvFormat::Wide), ValidationError);
}

TEST_CASE("group labels ride along and must be consistent") {
  const std::string csv =
      "respondent_id,school_id,group_label,item_1,item_2\n"
      "r1,sA,inn,1,2\n"
      "r2,sA,inn,3,4\n"
      "r3,sB,reg,1,1\n"
      "r4,sB,reg,2,2\n";
  const auto ds = load_responses_text(csv, CsvFormat::Wide);
  CHECK(*ds.group_labels[0] == "inn");
  CHECK(*ds.group_labels[1] == "reg");

  const std::string bad =
      "respondent_id,school_id,group_label,item_1,item_2\n"
      "r1,sA,inn,1,2\n"
      "r2,sA,reg,3,4\n";
  CHECK_THROWS_AS(load_responses_text(bad, CsvFormat::Wide), ValidationError);
}

TEST_CASE("long format round trip") {
  const std::string csv =
      "respondent_id,school_id,item_id,code\n"
      "r1,sA,q1,1\n"
      "r1,sA,q2,5\n"
      "r2,sA,q1,4\n"
      "r2,sA,q2,2\n";
  const auto ds = load_responses_text(csv, CsvFormat::Long);
  CHECK(ds.n_items() == 2);
  CHECK(ds.item_ids[0] == "q1");
  CHECK(ds.respondents[0].codes == std::vector<int>{1, 5});

  // respondent missing one item is dropped
  const std::string partial = csv + "r3,sA,q1,3\n";
  const auto ds2 = load_responses_text(partial, CsvFormat::Long);
  CHECK(ds2.dropped_count == 1);
  CHECK(ds2.n_in_school(0) == 2);

  // duplicate response cell
  const std::string dup = csv + "r1,sA,q1,2\n";
  CHECK_THROWS_AS(load_responses_text(dup, CsvFormat::Long), ValidationError);
}

TEST_CASE("dichotomize thresholds Likert codes at the cut") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2,item_3,item_4,item_5\n"
      "r1,sA,1,2,3,4,5\n"
      "r2,sA,5,4,3,2,1\n";
  const auto ds = load_responses_text(csv, CsvFormat::Wide);
  const auto mats = dichotomize(ds, 4);
  REQUIRE(mats.size() == 1);
  const auto& X = mats[0].X;
  CHECK(X(0, 0) == 0);
  CHECK(X(0, 1) == 0);
  CHECK(X(0, 2) == 0);
  CHECK(X(0, 3) == 1);
  CHECK(X(0, 4) == 1);
  CHECK(X(1, 0) == 1);
  CHECK(X(1, 4) == 0);
}

TEST_CASE("binary pass-through keeps codes as they are") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,0,1\n"
      "r2,sA,1,0\n";
  const auto ds = load_responses_text(csv, CsvFormat::Wide);
  const auto mats = dichotomize(ds, 4, CodeMode::Binary);
  CHECK(mats[0].X(0, 0) == 0);
  CHECK(mats[0].X(0, 1) == 1);
  CHECK(mats[0].X(1, 0) == 1);
}

TEST_CASE("out-of-range codes are domain errors") {
  const std::string csv =
      "respondent_id,school_id,item_1,item_2\n"
      "r1,sA,6,1\n"
      "r2,sA,1,1\n";
  const auto ds = load_responses_text(csv, CsvFormat::Wide);
  CHECK_THROWS_AS(dichotomize(ds, 4), DomainError);
  CHECK_THROWS_AS(dichotomize(ds, 4, CodeMode::Binary), DomainError);
  const auto ok = load_responses_text(kWideCsv, CsvFormat::Wide);
  CHECK_THROWS_AS(dichotomize(ok, 1), DomainError);
  CHECK_THROWS_AS(dichotomize(ok, 6), DomainError);
}

TEST_CASE("multiplex: all-ones X gives complete graphs") {
  BinarySchoolMatrix bsm{"s", BitMatrix(3, 2, 1)};
  const auto nets = build_multiplex(bsm);
  REQUIRE(nets.item_layers.size() == 2);
  REQUIRE(nets.person_layers.size() == 3);
  for (const auto& Y : nets.item_layers) {
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) CHECK(Y(k, l) == (k == l ? 0 : 1));
    }
  }
  for (const auto& U : nets.person_layers) {
    CHECK(U(0, 1) == 1);
    CHECK(U(1, 0) == 1);
    CHECK(U(0, 0) == 0);
  }
}

TEST_CASE("multiplex: diagonal X has no co-positive pairs") {
  BinarySchoolMatrix bsm{"s", BitMatrix(2, 2, 0)};
  bsm.X(0, 0) = 1;
  bsm.X(1, 1) = 1;
  const auto nets = build_multiplex(bsm);
  for (const auto& Y : nets.item_layers) {
    CHECK(Y(0, 1) == 0);
    CHECK(Y(1, 0) == 0);
  }
  for (const auto& U : nets.person_layers) {
    CHECK(U(0, 1) == 0);
  }
}

TEST_CASE("multiplex: all-zero row is isolated everywhere") {
  BinarySchoolMatrix bsm{"s", BitMatrix(3, 3, 1)};
  for (int i = 0; i < 3; ++i) bsm.X(1, i) = 0;
  const auto nets = build_multiplex(bsm);
  for (const auto& Y : nets.item_layers) {
    for (int l = 0; l < 3; ++l) {
      CHECK(Y(1, l) == 0);
      CHECK(Y(l, 1) == 0);
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(nets.person_layers[1](i, j) == 0);
  }
}

TEST_CASE("multiplex invariants on random matrices") {
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 2 + static_cast<int>(rng.uniform_below(5));
    const int p = 2 + static_cast<int>(rng.uniform_below(5));
    BinarySchoolMatrix bsm{"s", BitMatrix(n, p)};
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < p; ++i) bsm.X(k, i) = rng.uniform() < 0.5 ? 1 : 0;
    }
    const auto nets = build_multiplex(bsm);
    // exhaustive product identities, symmetry, degree identity
    std::vector<int> colsum(p, 0);
    for (int i = 0; i < p; ++i) {
      for (int k = 0; k < n; ++k) colsum[i] += bsm.X(k, i);
    }
    for (int i = 0; i < p; ++i) {
      for (int k = 0; k < n; ++k) {
        int degree = 0;
        for (int l = 0; l < n; ++l) {
          if (k != l) CHECK(nets.item_layers[i](k, l) == (bsm.X(k, i) & bsm.X(l, i)));
          CHECK(nets.item_layers[i](k, l) == nets.item_layers[i](l, k));
          degree += nets.item_layers[i](k, l);
        }
        CHECK(degree == bsm.X(k, i) * (colsum[i] - bsm.X(k, i)));
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
          if (i != j) CHECK(nets.person_layers[k](i, j) == (bsm.X(k, i) & bsm.X(k, j)));
          CHECK(nets.person_layers[k](i, j) == nets.person_layers[k](j, i));
        }
      }
    }
    // pure function of X
    const auto nets2 = build_multiplex(bsm);
    CHECK(nets.item_layers == nets2.item_layers);
    CHECK(nets.person_layers == nets2.person_layers);
  }
}

}  // TEST_SUITE

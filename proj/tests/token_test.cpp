#include "doctest.h"
#include "o3/errors.hpp"
#include "o3/token.hpp"

using namespace o3;

TEST_SUITE("token") {
  TEST_CASE("next_token prepends the call line") {
    CHECK(next_token(4, Token{}).lines == std::vector<int>{4});
    CHECK(next_token(2, Token{{4}}).lines == std::vector<int>{2, 4});
    CHECK(next_token(5, Token{{7, 8}}).lines == std::vector<int>{5, 7, 8});
  }

  TEST_CASE("key printing and flattening") {
    const IntegrityKey k{1, Token{{4}}};
    CHECK(k.to_string() == "(1,[4])");
    CHECK(k.flatten() == std::vector<int>{1, 4});
    CHECK(to_string(TokenExpr{Placeholder{}}) == "t");
    CHECK(to_string(TokenExpr{Token{{5, 7}}}) == "[5,7]");
  }

  TEST_CASE("placeholder is not concrete") {
    CHECK_THROWS_AS(concrete(Placeholder{}), PlaceholderToken);
    CHECK(concrete(Token{{3}}).lines == std::vector<int>{3});
  }

  TEST_CASE("a call key is a prefix of the keys it spawns") {
    const IntegrityKey call{4, Token{}};
    CHECK(is_prefix(call, {1, Token{{4}}}));
    CHECK(strict_prefix(call, {1, Token{{4}}}));
    CHECK(is_prefix(call, {3, Token{{5, 4}}}));
    CHECK_FALSE(is_prefix(call, {1, Token{{5}}}));
    CHECK_FALSE(is_prefix({1, Token{{4}}}, call));
    CHECK(is_prefix({5, Token{{7}}}, {1, Token{{5, 7}}}));
    CHECK_FALSE(is_prefix({5, Token{{8}}}, {1, Token{{5, 7}}}));
  }

  TEST_CASE("prefix is reflexive but not strict on equal keys") {
    const IntegrityKey k{2, Token{{5, 7}}};
    CHECK(is_prefix(k, k));
    CHECK_FALSE(strict_prefix(k, k));
    CHECK_FALSE(disjoint(k, k));
  }

  TEST_CASE("sibling calls are disjoint") {
    CHECK(disjoint({1, Token{{4}}}, {1, Token{{5}}}));
    CHECK(disjoint({4, Token{}}, {5, Token{}}));
    CHECK_FALSE(disjoint({4, Token{}}, {3, Token{{4}}}));
  }
}

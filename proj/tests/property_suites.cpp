#include "ma_radial/verify.hpp"

#include <doctest.h>

using namespace ma_radial;

namespace {

void require_pass(const VerifyReport& rep) {
    for (const auto& p : rep.properties) {
        INFO(p.name, ": ", p.failures, "/", p.checked, " failed, worst margin ", p.worst_margin, " at ", p.worst_case);
        CHECK(p.passed());
        CHECK(p.checked > 0);
    }
}

} // namespace

TEST_CASE("operator bound properties hold on random problems") { require_pass(run_suite(Suite::lemmas, 100, 7)); }

TEST_CASE("operator properties hold on random problems") { require_pass(run_suite(Suite::operator_, 20, 11)); }

TEST_CASE("iterated solutions agree with shooting roots") { require_pass(run_suite(Suite::oracle, 20, 3)); }

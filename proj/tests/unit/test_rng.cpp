#include <doctest.h>

#include "mptcs/rng.hpp"

using namespace mptcs;

TEST_CASE("keyed rng replays exactly") {
    KeyedRng a(42, 7);
    KeyedRng b(42, 7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams are independent") {
    KeyedRng a(42, 0);
    KeyedRng b(42, 1);
    int equal = 0;
    for (int i = 0; i < 64; ++i)
        if (a.next_u64() == b.next_u64()) ++equal;
    CHECK(equal == 0);
}

TEST_CASE("next_int stays inclusive of both ends") {
    KeyedRng rng(3, 0);
    bool saw_lo = false, saw_hi = false;
    for (int i = 0; i < 1000; ++i) {
        int v = rng.next_int(-2, 5);
        CHECK(v >= -2);
        CHECK(v <= 5);
        saw_lo |= v == -2;
        saw_hi |= v == 5;
    }
    CHECK(saw_lo);
    CHECK(saw_hi);
}

TEST_CASE("next_unit is roughly uniform") {
    KeyedRng rng(9, 0);
    double acc = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        double u = rng.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        acc += u;
    }
    CHECK(acc / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("derive_key separates tags") {
    CHECK(derive_key(1, 0) != derive_key(1, 1));
    CHECK(derive_key(1, 0) != derive_key(2, 0));
    CHECK(derive_key(1, 5) == derive_key(1, 5));
}

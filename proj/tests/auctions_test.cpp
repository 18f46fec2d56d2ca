#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "mecheff/auctions.hpp"

using namespace mecheff;

namespace {

void check_outcome_invariants(const BidVector& bids, const AuctionOutcome& out, int t)
{
    CHECK(out.winners.size() <= static_cast<std::size_t>(t));
    CHECK(out.payments.size() == out.winners.size());
    double eff = 0.0, rev = 0.0;
    for (std::size_t i = 0; i < out.winners.size(); ++i) {
        eff += bids[out.winners[i]];
        rev += out.payments[i];
        CHECK(out.payments[i] >= 0.0);
        CHECK(out.payments[i] <= bids[out.winners[i]]);
    }
    CHECK(out.efficiency == doctest::Approx(eff));
    CHECK(out.revenue == doctest::Approx(rev));
}

}  // namespace

TEST_CASE("ema examples")
{
    const BidVector a{3, 1, 2};
    auto out = ema(a, 1);
    CHECK(out.winners == std::vector<std::size_t>{0});
    CHECK(out.payment_of(0) == 2.0);
    CHECK(out.efficiency == 3.0);
    CHECK(out.revenue == 2.0);

    out = ema(BidVector{3, 2, 1.5, 0.5}, 2);
    CHECK(out.winners == std::vector<std::size_t>{0, 1});
    CHECK(out.payment_of(0) == 1.5);
    CHECK(out.payment_of(1) == 1.5);
    CHECK(out.efficiency == 5.0);
    CHECK(out.revenue == 3.0);

    out = ema(BidVector{4}, 2);
    CHECK(out.winners == std::vector<std::size_t>{0});
    CHECK(out.payment_of(0) == 0.0);
    CHECK(out.efficiency == 4.0);
}

TEST_CASE("rma examples")
{
    auto out = rma(BidVector{3, 1, 2}, 1, 2.5);
    CHECK(out.winners == std::vector<std::size_t>{0});
    CHECK(out.payment_of(0) == 2.5);

    out = rma(BidVector{3, 2, 0.5, 1.5}, 2, 1.0);
    CHECK(out.winners == std::vector<std::size_t>{0, 1});
    CHECK(out.payment_of(0) == 1.5);
    CHECK(out.payment_of(1) == 1.5);
    CHECK(out.revenue == 3.0);

    out = rma(BidVector{0.4, 0.3}, 1, 0.5);
    CHECK(out.winners.empty());
    CHECK(out.efficiency == 0.0);
    CHECK(out.revenue == 0.0);

    // Only one bidder clears the reserve out of three items.
    out = rma(BidVector{0.2, 5.0, 0.1}, 3, 1.0);
    CHECK(out.winners == std::vector<std::size_t>{1});
    CHECK(out.payment_of(1) == 1.0);
    CHECK(out.payment_of(0) == 0.0);
}

TEST_CASE("ties go to the lowest index")
{
    auto out = ema(BidVector{1, 2, 2, 2}, 2);
    CHECK(out.winners == std::vector<std::size_t>{1, 2});
    CHECK(out.payment_of(1) == 2.0);

    out = rma(BidVector{1, 1, 1}, 1, 1.0);
    CHECK(out.winners == std::vector<std::size_t>{0});
    CHECK(out.payment_of(0) == 1.0);
}

TEST_CASE("invalid inputs")
{
    CHECK_THROWS_AS(BidVector(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(BidVector({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(BidVector({1.0, INFINITY}), std::invalid_argument);
    CHECK_THROWS_AS(ema(BidVector{1}, 0), std::invalid_argument);
    CHECK_THROWS_AS(rma(BidVector{1}, 1, 0.0), std::invalid_argument);
}

TEST_CASE("property: mechanism invariants on random bid vectors")
{
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> size(1, 12);
    std::uniform_int_distribution<int> supply(1, 4);
    std::exponential_distribution<double> value(1.0);
    std::uniform_int_distribution<int> coarse(0, 5);

    for (int iter = 0; iter < 3000; ++iter) {
        std::vector<double> raw(static_cast<std::size_t>(size(gen)));
        // Mix continuous values with a coarse lattice so ties are common.
        for (double& b : raw) b = (iter % 2) ? value(gen) : coarse(gen) * 0.5;
        const BidVector bids(raw);
        const int t = supply(gen);
        const double reserve = 0.05 + value(gen);

        const auto e = ema(bids, t);
        const auto r = rma(bids, t, reserve);
        check_outcome_invariants(bids, e, t);
        check_outcome_invariants(bids, r, t);

        // The reserve can only remove winners.
        CHECK(e.efficiency >= r.efficiency);
        for (double p : r.payments) CHECK(p >= reserve);

        // Determinism.
        const auto e2 = ema(bids, t);
        CHECK(e2.winners == e.winners);
        CHECK(e2.payments == e.payments);

        // With all bids positive, a tiny reserve turns single-item RMA into EMA.
        if (std::all_of(raw.begin(), raw.end(), [](double b) { return b > 0.0; })) {
            const double tiny = *std::min_element(raw.begin(), raw.end()) * 0.5;
            const auto e1 = ema(bids, 1);
            const auto r1 = rma(bids, 1, tiny);
            CHECK(r1.winners == e1.winners);
            CHECK(r1.efficiency == e1.efficiency);
            if (raw.size() > 1) CHECK(r1.revenue == e1.revenue);
        }

        // Dropping a bidder strictly below the (t+1)-th highest bid leaves EMA unchanged.
        if (raw.size() > static_cast<std::size_t>(t) + 1) {
            std::vector<double> sorted = raw;
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            const double threshold = sorted[static_cast<std::size_t>(t)];
            for (std::size_t i = 0; i < raw.size(); ++i) {
                if (!(raw[i] < threshold)) continue;
                std::vector<double> fewer = raw;
                fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
                const auto e3 = ema(BidVector(fewer), t);
                CHECK(e3.efficiency == e.efficiency);
                CHECK(e3.revenue == e.revenue);
                break;
            }
        }
    }
}

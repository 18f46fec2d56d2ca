#include "mecheff/auctions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mecheff {

BidVector::BidVector(std::initializer_list<double> bids) : bids_(bids) { validate(); }

BidVector::BidVector(std::vector<double> bids) : bids_(std::move(bids)) { validate(); }

void BidVector::assign(std::span<const double> bids)
{
    bids_.assign(bids.begin(), bids.end());
    validate();
}

void BidVector::validate() const
{
    if (bids_.empty()) throw std::invalid_argument("bid vector must be nonempty");
    for (double b : bids_)
        if (!std::isfinite(b) || b < 0.0)
            throw std::invalid_argument("bids must be finite and nonnegative");
}

double AuctionOutcome::payment_of(std::size_t bidder) const
{
    for (std::size_t i = 0; i < winners.size(); ++i)
        if (winners[i] == bidder) return payments[i];
    return 0.0;
}

namespace {

// Indices of the top `count` bidders, highest bid first, lower index on ties.
std::vector<std::size_t> top_bidders(std::span<const double> bids, std::size_t count)
{
    std::vector<std::size_t> order(bids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    count = std::min(count, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return bids[a] > bids[b] || (bids[a] == bids[b] && a < b);
                      });
    order.resize(count);
    return order;
}

void check_supply(int t)
{
    if (t < 1) throw std::invalid_argument("item supply t must be at least 1");
}

AuctionOutcome settle(std::span<const double> bids, std::vector<std::size_t> winners, double price)
{
    AuctionOutcome out;
    out.winners = std::move(winners);
    out.payments.assign(out.winners.size(), price);
    for (std::size_t w : out.winners) {
        out.efficiency += bids[w];
        out.revenue += price;
    }
    return out;
}

}  // namespace

AuctionOutcome ema(const BidVector& bids, int t)
{
    check_supply(t);
    const auto supply = static_cast<std::size_t>(t);
    auto order = top_bidders(bids.values(), supply + 1);
    const double price = order.size() > supply ? bids[order[supply]] : 0.0;
    order.resize(std::min(order.size(), supply));
    return settle(bids.values(), std::move(order), price);
}

AuctionOutcome rma(const BidVector& bids, int t, double reserve)
{
    check_supply(t);
    if (!(reserve > 0.0) || !std::isfinite(reserve))
        throw std::invalid_argument("reserve must be positive and finite");
    const auto supply = static_cast<std::size_t>(t);
    auto order = top_bidders(bids.values(), supply + 1);
    const double next_bid = order.size() > supply ? bids[order[supply]] : 0.0;
    const double price = std::max(reserve, next_bid);
    order.resize(std::min(order.size(), supply));
    // Bidders below the reserve form a suffix of the ranking.
    while (!order.empty() && bids[order.back()] < reserve) order.pop_back();
    return settle(bids.values(), std::move(order), price);
}

}  // namespace mecheff

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace mecheff {

/// Truthful bids; bidder identity is the index. Nonempty, finite, nonnegative.
class BidVector {
public:
    BidVector() = default;
    BidVector(std::initializer_list<double> bids);
    explicit BidVector(std::vector<double> bids);

    /// Replace the contents in place (reuses storage). Validates like the constructors.
    void assign(std::span<const double> bids);

    std::span<const double> values() const { return bids_; }
    std::size_t size() const { return bids_.size(); }
    double operator[](std::size_t i) const { return bids_[i]; }

private:
    void validate() const;

    std::vector<double> bids_;
};

/// winners are listed from highest to lowest bid; payments[i] is paid by winners[i].
struct AuctionOutcome {
    std::vector<std::size_t> winners;
    std::vector<double> payments;
    double efficiency = 0.0;
    double revenue = 0.0;

    /// 0 for bidders who do not win.
    double payment_of(std::size_t bidder) const;
};

/// VCG for t identical unit-demand items: the t highest bidders win and each
/// pays the (t+1)-th highest bid (0 if there is none). Ties go to the lower index.
AuctionOutcome ema(const BidVector& bids, int t);

/// Myerson in reserve-price form: among bids >= reserve, the min(t, count)
/// highest win and each pays max(reserve, (t+1)-th highest bid overall).
AuctionOutcome rma(const BidVector& bids, int t, double reserve);

}  // namespace mecheff

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "m2m/core_model.hpp"
#include "m2m/errors.hpp"
#include "support/instances.hpp"

using namespace m2m;
using m2m::testing::shannon;

namespace {

/// Argmax of the off-diagonal row mean, lowest id on ties.
std::size_t recompute_coordinator(const ChannelGains& g, const std::vector<std::size_t>& members) {
    std::size_t best = members.front();
    double best_mean = -1.0;
    for (std::size_t x : members) {
        double sum = 0.0;
        for (std::size_t y : members)
            if (y != x) sum += g.device_to_device(x, y);
        const double mean = sum / static_cast<double>(members.size() - 1);
        if (mean > best_mean) {
            best_mean = mean;
            best = x;
        }
    }
    return best;
}

ChannelGains random_symmetric(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.01, 2.0);
    ChannelGains g(n, 1, 1);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) g.device_to_device(a, b) = g.device_to_device(b, a) = u(rng);
    return g;
}

}  // namespace

TEST(Pathloss, UnitDistanceGivesUnitGain) { EXPECT_DOUBLE_EQ(PathlossModel{}.gain(1.0), 1.0); }

TEST(Pathloss, TenMetresAtExponentFour) { EXPECT_NEAR(PathlossModel{}.gain(10.0), 1e-4, 1e-18); }

TEST(Pathloss, ClampsBelowMinimumDistance) {
    EXPECT_DOUBLE_EQ(PathlossModel{}.gain(0.5), 1.0);
    EXPECT_DOUBLE_EQ(PathlossModel{}.gain(0.0), 1.0);
}

TEST(Pathloss, ReferenceDistanceSetsUnitGainPoint) {
    PathlossModel m{4.0, 1.0, 1000.0};
    EXPECT_DOUBLE_EQ(m.gain(1000.0), 1.0);
    EXPECT_NEAR(m.gain(500.0), 16.0, 1e-12);
}

TEST(Pathloss, RejectsNonpositiveExponent) {
    EXPECT_THROW((PathlossModel{0.0, 1.0, 1.0}.validate()), ConfigError);
    EXPECT_THROW((PathlossModel{-2.0, 1.0, 1.0}.validate()), ConfigError);
    const std::vector<Position> pos{{0, 0}, {1, 0}};
    EXPECT_THROW(derive_gains(PathlossModel{0.0, 1.0, 1.0}, pos, {}, 1, 1), ConfigError);
}

TEST(DeriveGains, SymmetricPositiveAndPure) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-500.0, 500.0);
    std::vector<Position> pos;
    for (int i = 0; i < 12; ++i) pos.push_back({u(rng), u(rng)});
    const PathlossModel model{};
    const auto g = derive_gains(model, pos, {0, 0}, 3, 2);
    const auto again = derive_gains(model, pos, {0, 0}, 3, 2);
    EXPECT_EQ(g, again);
    for (std::size_t a = 0; a < pos.size(); ++a) {
        EXPECT_EQ(g.device_to_device(a, a), 0.0);
        for (std::size_t b = 0; b < pos.size(); ++b) {
            if (a == b) continue;
            EXPECT_GT(g.device_to_device(a, b), 0.0);
            EXPECT_EQ(g.device_to_device(a, b), g.device_to_device(b, a));
            EXPECT_DOUBLE_EQ(g.device_to_device(a, b), model.gain(std::hypot(pos[a].x_m - pos[b].x_m, pos[a].y_m - pos[b].y_m)));
        }
        for (std::size_t r = 0; r < 3; ++r) EXPECT_GT(g.device_to_enb(a, r), 0.0);
        for (std::size_t r = 0; r < 2; ++r) EXPECT_GT(g.backhaul(a, r), 0.0);
    }
}

TEST(SelectCoordinator, EqualGainsPickLowestId) {
    ChannelGains g(4, 1, 1);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b)
            if (a != b) g.device_to_device(a, b) = 0.5;
    const std::vector<std::size_t> members{2, 1, 3};
    EXPECT_EQ(select_coordinator(g, members), 1u);
}

TEST(SelectCoordinator, HandWorkedThreeDeviceExample) {
    ChannelGains g(4, 1, 1);
    auto set = [&](std::size_t a, std::size_t b, double v) { g.device_to_device(a, b) = g.device_to_device(b, a) = v; };
    set(1, 2, 0.9);
    set(1, 3, 0.9);
    set(2, 3, 0.1);
    const std::vector<std::size_t> members{1, 2, 3};
    EXPECT_EQ(select_coordinator(g, members), 1u);
}

TEST(SelectCoordinator, PairAndSingleton) {
    ChannelGains g(6, 1, 1);
    g.device_to_device(4, 5) = g.device_to_device(5, 4) = 0.3;
    const std::vector<std::size_t> pair{5, 4};
    EXPECT_EQ(select_coordinator(g, pair), 4u);
    const std::vector<std::size_t> single{3};
    EXPECT_EQ(select_coordinator(g, single), 3u);
    EXPECT_THROW(select_coordinator(g, std::vector<std::size_t>{}), std::invalid_argument);
}

TEST(SelectCoordinator, MatchesRecomputationAndIgnoresScaling) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 9;
        auto g = random_symmetric(n, rng);
        std::vector<std::size_t> members(n);
        for (std::size_t i = 0; i < n; ++i) members[i] = i;
        const auto chosen = select_coordinator(g, members);
        EXPECT_EQ(chosen, recompute_coordinator(g, members));

        ChannelGains scaled = g;
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) scaled.device_to_device(a, b) *= 8.0;
        EXPECT_EQ(select_coordinator(scaled, members), chosen);
    }
}

TEST(UplinkRate, IdleAtPaperParameters) {
    const double rate = uplink_rate(5e6, 0.1, 1.0, {}, 1e-3, RbState::Idle);
    EXPECT_NEAR(rate, shannon(5e6, 0.1, 1e-3), 1e-6);
    EXPECT_NEAR(rate / 1e7, 3.3291, 5e-5);
}

TEST(UplinkRate, ZeroPowerGivesZeroRate) {
    EXPECT_EQ(uplink_rate(5e6, 0.0, 1.0, {}, 1e-3, RbState::Idle), 0.0);
    EXPECT_EQ(backhaul_rate(1e7, 0.0, 1.0, 1e-3), 0.0);
}

TEST(UplinkRate, BusyWithOneInterferer) {
    const std::vector<Interferer> one{{0.1, 1.0}};
    const double rate = uplink_rate(5e6, 0.1, 1.0, one, 1e-3, RbState::Busy);
    EXPECT_NEAR(rate, shannon(5e6, 0.1, 0.101), 1e-6);
    EXPECT_NEAR(rate / 1e6, 4.9642, 5e-5);
}

TEST(UplinkRate, InterferersOnlyCountWhenBusy) {
    const std::vector<Interferer> many{{0.1, 1.0}, {0.1, 3.0}};
    EXPECT_EQ(uplink_rate(5e6, 0.1, 1.0, many, 1e-3, RbState::Idle), uplink_rate(5e6, 0.1, 1.0, {}, 1e-3, RbState::Idle));
    EXPECT_EQ(uplink_rate(5e6, 0.1, 1.0, {}, 1e-3, RbState::Busy), uplink_rate(5e6, 0.1, 1.0, {}, 1e-3, RbState::Idle));
}

TEST(UplinkRate, RejectsNonpositiveBandwidthOrNoise) {
    EXPECT_THROW(uplink_rate(0.0, 0.1, 1.0, {}, 1e-3, RbState::Idle), std::invalid_argument);
    EXPECT_THROW(uplink_rate(5e6, 0.1, 1.0, {}, 0.0, RbState::Idle), std::invalid_argument);
    EXPECT_THROW(backhaul_rate(-1.0, 0.1, 1.0, 1e-3), std::invalid_argument);
}

TEST(UplinkRate, MonotonicityProperties) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int i = 0; i < 500; ++i) {
        const double b = 1e6 * u(rng), p = 0.01 * u(rng), h = u(rng), n = 1e-3 * u(rng);
        const std::vector<Interferer> inter{{0.01 * u(rng), u(rng)}};
        const double idle = uplink_rate(b, p, h, inter, n, RbState::Idle);
        EXPECT_LE(uplink_rate(b, p, h, inter, n, RbState::Busy), idle);
        EXPECT_LE(idle, uplink_rate(b, 2 * p, h, inter, n, RbState::Idle));
        EXPECT_LE(idle, uplink_rate(2 * b, p, h, inter, n, RbState::Idle));
        EXPECT_GE(idle, uplink_rate(b, p, h, inter, 2 * n, RbState::Idle));
    }
}

TEST(BackhaulRate, PaperParameters) {
    const double rate = backhaul_rate(1e7, 0.1, 1.0, 1e-3);
    EXPECT_NEAR(rate, shannon(1e7, 0.1, 1e-3), 1e-6);
    EXPECT_NEAR(rate / 1e7, 6.6582, 5e-5);
}

TEST(BackhaulRate, LinearInBandwidth) {
    EXPECT_DOUBLE_EQ(backhaul_rate(2e7, 0.1, 0.7, 1e-3), 2.0 * backhaul_rate(1e7, 0.1, 0.7, 1e-3));
}

TEST(VirtualNetwork, ValidationCatchesBadFields) {
    VirtualNetwork net;
    net.devices.push_back(MtcDevice{0, {}, 0.1, 0.01, 0.5e9, 1.0});
    net.rb_enb = 1;
    net.rb_coord = 1;
    EXPECT_NO_THROW(net.validate());
    auto bad = net;
    bad.coordinator = 7;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = net;
    bad.devices[0].tx_power_w = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = net;
    bad.rb_enb = bad.rb_coord = 0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

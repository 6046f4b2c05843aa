// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "dectsim/common/types.hpp"
#include "dectsim/numerology/numerology.hpp"
#include "dectsim/numerology/packet_format.hpp"
#include "dectsim/numerology/packet_layout.hpp"

using namespace dectsim;

TEST_CASE("numerology examples") {
    const auto a = derive_numerology(1, 1);
    CHECK(a.subcarrier_spacing_hz == 27000);
    CHECK(a.fft_size == 64);
    CHECK(a.sample_rate_hz == 1728000);
    CHECK(a.cp_samples == 8);
    const auto b = derive_numerology(4, 2);
    CHECK(b.subcarrier_spacing_hz == 108000);
    CHECK(b.fft_size == 128);
    CHECK(b.sample_rate_hz == 13824000);
    const auto c = derive_numerology(8, 16);
    CHECK(c.subcarrier_spacing_hz == 216000);
    CHECK(c.fft_size == 1024);
    CHECK(c.sample_rate_hz == 221184000);
    CHECK_THROWS_AS(derive_numerology(3, 1), validation_error);
    CHECK_THROWS_AS(derive_numerology(1, 3), validation_error);
}

TEST_CASE("slot timing closes for every legal pair") {
    for (const uint32_t mu : {1u, 2u, 4u, 8u}) {
        for (const uint32_t beta : {1u, 2u, 4u, 8u, 12u, 16u}) {
            const auto n = derive_numerology(mu, beta);
            CAPTURE(mu);
            CAPTURE(beta);
            CHECK(n.sample_rate_hz >= 1728000u);
            CHECK(n.sample_rate_hz <= 221184000u);
            CHECK(n.symbols_per_slot == 10 * mu);
            // (fft + cp) * symbols / rate == 1/2400 s, in integers
            CHECK(uint64_t{n.samples_per_slot()} * 2400 == n.sample_rate_hz);
            CHECK(n.slot_duration_s == doctest::Approx(416.6666667e-6).epsilon(1e-9));
            CHECK(1.125 / n.subcarrier_spacing_hz * n.symbols_per_slot == doctest::Approx(n.slot_duration_s));
        }
        const auto n1 = derive_numerology(mu, 1);
        const auto n2 = derive_numerology(mu, 2);
        CHECK(n2.fft_size == 2 * n1.fft_size);
        CHECK(n2.sample_rate_hz == 2 * n1.sample_rate_hz);
        CHECK(n2.symbol_duration_s() == doctest::Approx(n1.symbol_duration_s()));
    }
}

TEST_CASE("preset formats") {
    const auto f0 = preset_format(format_name_t::format0);
    CHECK(f0.numerology == derive_numerology(1, 1));
    CHECK(f0.tbs_bits == 296);
    CHECK(f0.modulation == modulation_t::qpsk);
    CHECK(f0.code_rate == code_rate_t{1, 2});
    CHECK(f0.max_harq_retx == 0);
    const auto f1 = preset_format(format_name_t::format1);
    CHECK(f1.numerology == derive_numerology(4, 1));
    CHECK(f1.tbs_bits == 368);
    CHECK(f1.code_rate == code_rate_t{3, 4});
    CHECK(f1.max_harq_retx == 1);
    const auto f2 = preset_format(format_name_t::format2, 2);
    CHECK(f2.numerology == derive_numerology(4, 2));
    CHECK(f2.tbs_bits == 288);
    CHECK(f2.modulation == modulation_t::bpsk);
    CHECK(f2.n_tx_antennas == 2);
    for (const auto& f : {f0, f1, f2}) CHECK(f.tbs_bits >= min_urllc_tbs_bits);
}

TEST_CASE("mcs table anchors") {
    CHECK(mcs_entry(0).modulation == modulation_t::bpsk);
    CHECK(mcs_entry(0).code_rate == code_rate_t{1, 2});
    CHECK(mcs_entry(1).modulation == modulation_t::qpsk);
    CHECK(mcs_entry(2).code_rate == code_rate_t{2, 3});
    CHECK(mcs_entry(7).modulation == modulation_t::qam64);
    CHECK(mcs_entry(7).code_rate == code_rate_t{5, 6});
    CHECK_THROWS_AS(mcs_entry(10), validation_error);
    uint32_t prev = 0;
    for (uint32_t i = 0; i < 10; ++i) {
        const auto f = mcs_format(i);
        CHECK(f.tbs_bits > prev);
        CHECK(f.tbs_bits % 8 == 0);
        CHECK(payload_capacity_bits(f) >= f.tbs_bits + 24);
        prev = f.tbs_bits;
    }
}

TEST_CASE("grid dimensions match the lattice enumeration") {
    // counts from the enumeration oracle
    struct row_t {
            format_name_t f;
            uint32_t n_tx, total, drs, data;
    };
    const row_t rows[] = {{format_name_t::format0, 1, 640, 32, 446},
                          {format_name_t::format0, 2, 640, 64, 414},
                          {format_name_t::format2, 1, 1280, 64, 990},
                          {format_name_t::format2, 2, 1280, 128, 926}};
    for (const auto& r : rows) {
        const auto d = packet_grid_dimensions(preset_format(r.f, r.n_tx));
        CHECK(d.n_symbols * d.n_subcarriers == r.total);
        CHECK(d.n_stf_symbols == 1);
        CHECK(d.n_drs_res == r.drs);
        CHECK(d.n_pcc_res == 98);
        CHECK(d.n_data_res == r.data);
        CHECK(d.n_data_res == r.total - d.n_subcarriers - r.drs - 98);
    }
    const packet_layout_t l(10, 64, 2);
    const uint32_t per_row[10] = {0, 0, 0, 62, 64, 64, 32, 64, 64, 64};
    for (uint32_t s = 0; s < 10; ++s) {
        uint32_t n = 0;
        for (uint32_t k = 0; k < 64; ++k) n += l.label(s, k) == re_label_t::data;
        CHECK(n == per_row[s]);
    }
    for (const uint32_t i : l.drs_res(0)) {
        for (const uint32_t j : l.drs_res(1)) CHECK(i != j);
    }
    CHECK(packet_layout_t(preset_format(format_name_t::format0)) == packet_layout_t(preset_format(format_name_t::format0)));
    CHECK_THROWS_AS(packet_layout_t(0, 64, 1), config_error);
    CHECK_THROWS_AS(packet_layout_t(2, 64, 1), config_error);
}

TEST_CASE("payload capacity") {
    CHECK(payload_capacity_bits(preset_format(format_name_t::format0)) == 892);
    CHECK(payload_capacity_bits(preset_format(format_name_t::format1)) == 892);
    CHECK(payload_capacity_bits(preset_format(format_name_t::format2)) == 990);
    CHECK(payload_capacity_bits(0, modulation_t::bpsk) == 0);
    auto bad = preset_format(format_name_t::format0);
    bad.tbs_bits = 900;
    CHECK_THROWS_AS(payload_capacity_bits(bad), config_error);
}

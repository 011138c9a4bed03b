#include <doctest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "test_util.hpp"
#include "vinv/volume.hpp"

using namespace vinv;
using testutil::TempDir;

namespace {

void write_raw(const std::filesystem::path& header, const std::string& json, const std::vector<char>& bytes) {
    std::ofstream(header) << json;
    std::ofstream r(raw_path_for(header), std::ios::binary);
    r.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::vector<char> f32_bytes(const std::vector<float>& values) {
    std::vector<char> out(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint32_t bits;
        std::memcpy(&bits, &values[i], 4);
        for (int b = 0; b < 4; ++b) out[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    return out;
}

MaskVolume random_mask(Dims d, std::vector<ChannelId> ch, std::mt19937& rng) {
    MaskVolume v(d, std::move(ch), {1, 1, 1});
    std::bernoulli_distribution bit(0.3);
    for (auto& x : v.data()) x = bit(rng);
    return v;
}

}  // namespace

TEST_CASE("header with ones payload reads back as an all-ones mask") {
    TempDir tmp("vol");
    const auto h = tmp / "ones.json";
    write_raw(h, R"({"dims":[2,2,2],"channels":["tumor"],"dtype":"u8"})", std::vector<char>(8, 1));
    const MaskVolume m = read_mask(h);
    CHECK(m.dims() == Dims{2, 2, 2});
    CHECK(m.channels() == std::vector<ChannelId>{ChannelId::Tumor});
    CHECK(std::all_of(m.data().begin(), m.data().end(), [](auto v) { return v == 1; }));
}

TEST_CASE("payload length disagreeing with dims is rejected") {
    TempDir tmp("vol");
    const auto h = tmp / "short.json";
    write_raw(h, R"({"dims":[2,2,2],"channels":["tumor"],"dtype":"u8"})", std::vector<char>(7, 1));
    CHECK_THROWS_WITH_AS(read_volume(h), doctest::Contains("payload size mismatch"), VolumeError);
}

TEST_CASE("f32 payload slightly above one is clamped") {
    TempDir tmp("vol");
    const auto h = tmp / "p.json";
    write_raw(h, R"({"dims":[1,1,2],"channels":["vein"],"dtype":"f32"})", f32_bytes({1.0005f, 0.25f}));
    const ProbVolume p = read_prob(h);
    CHECK(p.data()[0] == 1.0f);
    CHECK(p.data()[1] == 0.25f);

    write_raw(h, R"({"dims":[1,1,2],"channels":["vein"],"dtype":"f32"})", f32_bytes({1.5f, 0.0f}));
    CHECK_THROWS_AS(read_prob(h), VolumeError);
}

TEST_CASE("malformed headers are rejected") {
    TempDir tmp("vol");
    const auto h = tmp / "bad.json";
    const std::vector<char> one(1, 0);
    write_raw(h, "{not json", one);
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    write_raw(h, R"({"dims":[1,1,1],"channels":["spleen"],"dtype":"u8"})", one);
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    write_raw(h, R"({"dims":[1,1,1],"channels":["tumor"],"dtype":"i16"})", one);
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    write_raw(h, R"({"dims":[1,1],"channels":["tumor"],"dtype":"u8"})", one);
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    write_raw(h, R"({"dims":[1,1,1],"channels":["tumor"],"dtype":"u8","spacing_mm":[1,0,1]})", one);
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    write_raw(h, R"({"dims":[1,1,1],"channels":["tumor"],"dtype":"u8"})", std::vector<char>(1, 3));
    CHECK_THROWS_AS(read_volume(h), VolumeError);
    CHECK_THROWS_AS(read_volume(tmp / "missing.json"), VolumeError);
}

TEST_CASE("round trips") {
    TempDir tmp("vol");
    std::mt19937 rng(11);

    SUBCASE("random 4x8x8 mask") {
        MaskVolume m = random_mask({4, 8, 8}, {ChannelId::Tumor, ChannelId::Artery, ChannelId::Vein}, rng);
        m.set_padding({{1, 2, 3}, {0, 0, 4}});
        write_volume(m, tmp / "m.json");
        CHECK(read_mask(tmp / "m.json") == m);
    }
    SUBCASE("probability volume of halves") {
        ProbVolume p({2, 3, 4}, {ChannelId::Pancreas}, {2.5, 0.7, 0.7}, std::vector<float>(24, 0.5f));
        write_volume(p, tmp / "p.json");
        CHECK(read_prob(tmp / "p.json") == p);
    }
    SUBCASE("layered labels") {
        LayeredLabelVolume lv{{1, 2, 5}, {1, 1, 1}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 0}, std::nullopt};
        write_volume(lv, tmp / "l.json");
        CHECK(std::get<LayeredLabelVolume>(read_volume(tmp / "l.json")) == lv);
    }
    SUBCASE("unwritable path") {
        MaskVolume m({1, 1, 1}, {ChannelId::Tumor}, {1, 1, 1});
        CHECK_THROWS_AS(write_volume(m, tmp / "no" / "such" / "dir" / "m.json"), VolumeError);
    }
}

TEST_CASE("decode_layered") {
    LayeredLabelVolume lv{{1, 1, 3}, {1, 1, 1}, {8, 0, 6}, std::nullopt};
    const MaskVolume m = decode_layered(lv);
    auto get = [&](ChannelId id, std::size_t x) { return m.channel(id)[x]; };
    for (ChannelId id : kBaseChannels) {
        const bool on8 = id == ChannelId::Vein || id == ChannelId::Tumor;
        CHECK(get(id, 0) == (on8 ? 1 : 0));
        CHECK(get(id, 1) == 0);
        CHECK(get(id, 2) == (id == ChannelId::Tumor ? 1 : 0));
    }
}

TEST_CASE("encode_layered inverts decode on encodable masks") {
    for (std::uint8_t label = 0; label <= 8; ++label) {
        LayeredLabelVolume lv{{1, 1, 1}, {1, 1, 1}, {label}, std::nullopt};
        CHECK(encode_layered(decode_layered(lv)).labels == lv.labels);
    }
}

TEST_CASE("resample") {
    SUBCASE("identity spacing") {
        std::mt19937 rng(3);
        MaskVolume m = random_mask({3, 5, 7}, {ChannelId::Tumor}, rng);
        CHECK(resample(m, m.spacing()) == m);
    }
    SUBCASE("constant field upsampled stays constant") {
        MaskVolume m({8, 8, 8}, {ChannelId::Vein}, {2, 2, 2}, std::vector<std::uint8_t>(512, 1));
        for (auto mode : {Interpolation::Nearest}) {
            const MaskVolume r = resample(m, {1, 1, 1}, mode);
            CHECK(r.dims() == Dims{16, 16, 16});
            CHECK(std::all_of(r.data().begin(), r.data().end(), [](auto v) { return v == 1; }));
        }
        ProbVolume p({8, 8, 8}, {ChannelId::Vein}, {2, 2, 2}, std::vector<float>(512, 0.75f));
        const ProbVolume rp = resample(p, {1, 1, 1}, Interpolation::Trilinear);
        CHECK(std::all_of(rp.data().begin(), rp.data().end(), [](float v) { return std::abs(v - 0.75f) < 1e-6f; }));
    }
    SUBCASE("single centred voxel against a brute-force nearest oracle") {
        MaskVolume m({5, 5, 5}, {ChannelId::Tumor}, {1, 1, 1});
        m.at(0, 2, 2, 2) = 1;
        const MaskVolume r = resample(m, {0.5, 0.5, 0.5});
        REQUIRE(r.dims() == Dims{10, 10, 10});
        std::size_t ones = 0;
        for (std::size_t z = 0; z < 10; ++z)
            for (std::size_t y = 0; y < 10; ++y)
                for (std::size_t x = 0; x < 10; ++x) {
                    // Output voxel centre mapped to source voxel index.
                    auto src = [](std::size_t o) { return static_cast<long>(std::floor((o + 0.5) * 0.5)); };
                    const bool expect = src(z) == 2 && src(y) == 2 && src(x) == 2;
                    CHECK(r.at(0, z, y, x) == (expect ? 1 : 0));
                    ones += r.at(0, z, y, x);
                }
        CHECK(ones == 8);
        CHECK(r.at(0, 4, 4, 4) == 1);
        CHECK(r.at(0, 5, 5, 5) == 1);
    }
    SUBCASE("trilinear is rejected for masks") {
        MaskVolume m({2, 2, 2}, {ChannelId::Tumor}, {1, 1, 1});
        CHECK_THROWS_AS(resample(m, {0.5, 0.5, 0.5}, Interpolation::Trilinear), VolumeError);
    }
}

TEST_CASE("crop_around") {
    SUBCASE("centred crop of an all-ones volume") {
        MaskVolume m({10, 12, 12}, {ChannelId::Tumor}, {1, 1, 1}, std::vector<std::uint8_t>(1440, 1));
        const MaskVolume c = crop_around(m, {5, 6, 6}, {4, 6, 6});
        CHECK(c.dims() == Dims{4, 6, 6});
        CHECK(std::all_of(c.data().begin(), c.data().end(), [](auto v) { return v == 1; }));
        REQUIRE(c.padding());
        CHECK(*c.padding() == CropPadding{});
    }
    SUBCASE("corner crop pads the overhanging faces with zeros") {
        MaskVolume m({4, 4, 4}, {ChannelId::Tumor}, {1, 1, 1}, std::vector<std::uint8_t>(64, 1));
        const MaskVolume c = crop_around(m, {0, 0, 0}, {4, 4, 4});
        REQUIRE(c.padding());
        CHECK(c.padding()->before == std::array<std::size_t, 3>{2, 2, 2});
        CHECK(c.at(0, 0, 0, 0) == 0);
        CHECK(c.at(0, 1, 1, 1) == 0);
        CHECK(c.at(0, 2, 2, 2) == 1);
        CHECK(c.at(0, 3, 3, 3) == 1);
    }
    SUBCASE("crop centred on a tumor voxel contains it") {
        MaskVolume m({20, 30, 30}, {ChannelId::Tumor}, {1, 1, 1});
        m.at(0, 13, 7, 21) = 1;
        const auto centre = channel_center(m, ChannelId::Tumor);
        REQUIRE(centre);
        const MaskVolume c = crop_around(m, *centre, {8, 16, 16});
        CHECK(c.at(0, 4, 8, 8) == 1);
    }
}

TEST_CASE("channel lookup errors") {
    MaskVolume m({1, 1, 1}, {ChannelId::Tumor}, {1, 1, 1});
    CHECK_THROWS_AS(m.channel(ChannelId::Vein), MissingChannelError);
    CHECK_THROWS_AS(MaskVolume({1, 1, 1}, {ChannelId::Tumor, ChannelId::Tumor}, {1, 1, 1}), VolumeError);
    CHECK(channel_from_name("tumor_vein") == ChannelId::TumorVein);
    CHECK_FALSE(channel_from_name("liver"));
}

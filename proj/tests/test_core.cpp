#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "amodal/cluster/kmeans.hpp"
#include "amodal/core/serialize.hpp"
#include "amodal/io/png_io.hpp"
#include "amodal/util/base64.hpp"
#include "amodal/util/hash.hpp"
#include "test_util.hpp"

using namespace amodal;
using namespace amodal::testutil;

TEST_CASE("mask boolean algebra") {
    const BinaryMask a = rect_mask(10, 8, {1, 1, 5, 5});
    const BinaryMask b = rect_mask(10, 8, {3, 3, 7, 7});

    CHECK(mask_area(a) == 16);
    CHECK(mask_area(mask_union(a, b)) == 28);
    CHECK(mask_area(mask_intersect(a, b)) == 4);
    CHECK(mask_area(mask_difference(a, b)) == 12);
    CHECK(mask_area(mask_complement(a)) == 80 - 16);

    // De Morgan on the complement.
    CHECK(mask_complement(mask_union(a, b)) ==
          mask_intersect(mask_complement(a), mask_complement(b)));

    CHECK_THROWS_AS(mask_union(a, BinaryMask(3, 3)), DimensionError);
}

TEST_CASE("mask subset and overlap ratio") {
    const BinaryMask small = rect_mask(10, 10, {2, 2, 4, 4});
    const BinaryMask big = rect_mask(10, 10, {1, 1, 6, 6});
    CHECK(mask_subset(small, big));
    CHECK_FALSE(mask_subset(big, small));
    CHECK(mask_subset(BinaryMask(10, 10), small));  // empty is subset of all

    CHECK(overlap_ratio(big, small) == doctest::Approx(4.0 / 25.0));
    CHECK(overlap_ratio(small, big) == doctest::Approx(1.0));
    CHECK_THROWS_AS(overlap_ratio(BinaryMask(10, 10), big), ContractError);
}

TEST_CASE("dilation grows by 2 pixels chebyshev per iteration") {
    BinaryMask m(20, 20);
    m.set(10, 10, true);
    const BinaryMask d1 = mask_dilate(m, 1);
    CHECK(mask_area(d1) == 25);  // 5x5 kernel
    CHECK(d1.at(8, 8));
    CHECK_FALSE(d1.at(7, 10));
    const BinaryMask d2 = mask_dilate(m, 2);
    CHECK(mask_area(d2) == 81);  // 9x9
    CHECK(mask_dilate(m, 0) == m);

    // Saturation: dilating a full mask is a no-op.
    const BinaryMask full(6, 6, true);
    CHECK(mask_dilate(full, 3) == full);
}

TEST_CASE("touches_boundary uses strict distance") {
    SUBCASE("pixel at distance d touches iff d < eps") {
        BinaryMask m(30, 30);
        m.set(2, 15, true);  // distance 2 from the left side
        CHECK(touches_boundary(m, 3).count(Side::left) == 1);
        CHECK(touches_boundary(m, 2).empty());
    }
    SUBCASE("all four sides") {
        const BinaryMask edge = rect_mask(30, 30, {0, 0, 30, 30});
        const auto sides = touches_boundary(edge, 1);
        CHECK(sides.size() == 4);
    }
    SUBCASE("interior mask touches nothing") {
        const BinaryMask inner = rect_mask(40, 40, {12, 12, 28, 28});
        CHECK(touches_boundary(inner, 10).empty());
        CHECK(touches_boundary(inner, 13).size() == 4);
    }
}

TEST_CASE("bbox, crop, pad, paste round trip") {
    const BinaryMask m = rect_mask(16, 12, {5, 3, 9, 8});
    const auto box = bbox_of_mask(m);
    REQUIRE(box.has_value());
    CHECK(*box == BBox{5, 3, 9, 8});
    CHECK_FALSE(bbox_of_mask(BinaryMask(4, 4)).has_value());

    const BinaryMask cropped = mask_crop(m, *box);
    CHECK(mask_area(cropped) == mask_area(m));
    CHECK(cropped.width() == 4);

    BinaryMask padded = mask_pad(cropped, 2, 1, 3, 0, false);
    CHECK(padded.width() == 7);
    CHECK(padded.height() == 8);
    CHECK(padded.at(2, 3));

    BinaryMask canvas(16, 12);
    mask_paste(canvas, cropped, box->x0, box->y0);
    CHECK(canvas == m);
}

TEST_CASE("image blend, crop, pad, paste") {
    DeterministicRng rng(1);
    const ImageBuffer img = random_image(12, 10, rng);
    const BinaryMask keep = rect_mask(12, 10, {3, 3, 8, 8});
    const ImageBuffer black(12, 10, Rgb{0, 0, 0});

    const ImageBuffer blended = image_blend(black, img, keep);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) {
            CHECK(blended.at(x, y) == (keep.at(x, y) ? img.at(x, y) : Rgb{0, 0, 0}));
        }
    }

    const BBox box{2, 1, 9, 6};
    const ImageBuffer cropped = image_crop(img, box);
    CHECK(cropped.width() == 7);
    CHECK(cropped.at(0, 0) == img.at(2, 1));

    ImageBuffer back = img;
    image_paste(back, cropped, box.x0, box.y0);
    CHECK(back == img);

    const ImageBuffer padded = image_pad(img, 1, 2, 3, 4, Rgb{255, 255, 255});
    CHECK(padded.width() == 15);
    CHECK(padded.height() == 17);
    CHECK(padded.at(0, 0) == Rgb{255, 255, 255});
    CHECK(padded.at(1, 3) == img.at(0, 0));
}

TEST_CASE("base64 round trip and known vectors") {
    CHECK(base64_encode(std::vector<std::uint8_t>{}) == "");
    const std::string abc = "abc";
    CHECK(base64_encode(reinterpret_cast<const std::uint8_t*>(abc.data()), 3) ==
          "YWJj");
    const std::string ab = "ab";
    CHECK(base64_encode(reinterpret_cast<const std::uint8_t*>(ab.data()), 2) == "YWI=");

    DeterministicRng rng(2);
    for (int n = 0; n < 40; ++n) {
        std::vector<std::uint8_t> bytes(static_cast<std::size_t>(rng.uniform_int(0, 200)));
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        CHECK(base64_decode(base64_encode(bytes)) == bytes);
    }
    CHECK_THROWS(base64_decode("not@valid!"));
}

TEST_CASE("fnv-1a content hash known vectors") {
    ContentHasher h;
    CHECK(h.value() == 0xcbf29ce484222325ull);  // offset basis
    CHECK(content_hash_hex("") == "cbf29ce484222325");
    CHECK(content_hash_hex("a") == "af63dc4c8601ec8c");
    CHECK(content_hash_hex("hello") != content_hash_hex("hellp"));
}

TEST_CASE("deterministic rng reproduces and forks independently") {
    DeterministicRng a(99);
    DeterministicRng b(99);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.next_u64() == b.next_u64());
    }
    for (int i = 0; i < 1000; ++i) {
        const double u = a.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const auto v = a.uniform_int(-3, 3);
        CHECK(v >= -3);
        CHECK(v <= 3);
    }
    DeterministicRng c(99);
    c.next_u64();
    CHECK(c.fork(1).next_u64() != c.fork(2).next_u64());
}

TEST_CASE("kmeans recovers separated clusters deterministically") {
    // Three tight blobs far apart; every point must land with its blob.
    Eigen::MatrixXf pts(30, 2);
    DeterministicRng rng(7);
    for (int i = 0; i < 30; ++i) {
        const int blob = i / 10;
        pts(i, 0) = static_cast<float>(blob * 100 + rng.uniform01());
        pts(i, 1) = static_cast<float>(blob * -50 + rng.uniform01());
    }
    const KMeansResult r1 = kmeans(pts, 3);
    CHECK(r1.k_effective == 3);
    for (int i = 0; i < 30; ++i) {
        CHECK(r1.assignments(i) == r1.assignments(10 * (i / 10)));
    }
    CHECK(r1.assignments(0) != r1.assignments(10));
    CHECK(r1.assignments(10) != r1.assignments(20));

    const KMeansResult r2 = kmeans(pts, 3);
    CHECK((r1.assignments.array() == r2.assignments.array()).all());
}

TEST_CASE("kmeans collapses duplicate points") {
    Eigen::MatrixXf pts = Eigen::MatrixXf::Ones(8, 3);
    const KMeansResult r = kmeans(pts, 4);
    CHECK(r.k_effective == 1);
    CHECK((r.assignments.array() == 0).all());
}

TEST_CASE("png io round trips exactly") {
    const auto dir = temp_dir("png-io");
    DeterministicRng rng(3);
    const ImageBuffer img = random_image(33, 21, rng);
    write_image_png(img, (dir / "img.png").string());
    CHECK(read_image_png((dir / "img.png").string()) == img);

    const BinaryMask mask = random_blob(33, 21, rng);
    write_mask_png(mask, (dir / "mask.png").string());
    CHECK(read_mask_png((dir / "mask.png").string()) == mask);

    CHECK(decode_image_png(encode_image_png(img)) == img);
    CHECK(decode_mask_png(encode_mask_png(mask)) == mask);
    CHECK_THROWS(read_image_png((dir / "missing.png").string()));
}

TEST_CASE("pipeline config json round trip and overlay semantics") {
    PipelineConfig config;
    config.composite_step = 17;
    config.open_vocabulary = {"cat", "fence"};
    const nlohmann::json j = config_to_json(config);
    const PipelineConfig back = config_from_json(j);
    CHECK(back.composite_step == 17);
    CHECK(back.open_vocabulary == config.open_vocabulary);
    CHECK(config_to_json(back) == j);

    // Partial documents overlay onto the base; unknown keys are rejected.
    const PipelineConfig merged =
        config_from_json(nlohmann::json{{"cluster_count", 9}}, config);
    CHECK(merged.cluster_count == 9);
    CHECK(merged.composite_step == 17);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"clusterz", 1}}), ContractError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"composite_step", 99}}),
                    ContractError);  // k > N fails validation
}

TEST_CASE("query and enum string conversions") {
    CHECK(sampler_from_string("mc") == SamplerKind::mc);
    CHECK(to_string(SamplerKind::naive) == "naive");
    CHECK_THROWS(sampler_from_string("diffuse"));

    CHECK(clean_background_color(CleanBackground::gray) == Rgb{128, 128, 128});
    CHECK(clean_background_from_string("forest") == CleanBackground::forest);
    CHECK_THROWS(clean_background_color(CleanBackground::original));

    CHECK_THROWS_AS(QuerySpec{}.validate(), ContractError);
}

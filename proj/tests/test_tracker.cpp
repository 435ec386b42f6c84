#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <trackref/core/errors.hpp>
#include <trackref/core/mot_io.hpp>
#include <trackref/tracking/hungarian.hpp>
#include <trackref/tracking/interpolate.hpp>
#include <trackref/tracking/neural_sort.hpp>

#include "test_util.hpp"

using namespace trackref;
using namespace trackref::tracking;

namespace {

// Exhaustive (feasible-count, cost) optimum over padded permutations.
std::pair<int, double> brute_force_best(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    const int m = static_cast<int>(cost.cols());
    const int k = std::max(n, m);
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    int best_size = -1;
    double best_cost = 0.0;
    do {
        int size = 0;
        double total = 0.0;
        for (int r = 0; r < k; ++r) {
            const int c = perm[r];
            if (r >= n || c >= m) continue;
            if (cost(r, c) >= kForbidden) continue;
            ++size;
            total += cost(r, c);
        }
        if (size > best_size || (size == best_size && total < best_cost)) {
            best_size = size;
            best_cost = total;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {best_size, best_cost};
}

Detection det(int frame, double x, double y, double w, double h, double conf = 0.9) {
    return Detection{frame, BBox{x, y, w, h}, conf, 1};
}

}  // namespace

TEST_CASE("hungarian small cases") {
    Eigen::MatrixXd cost(2, 2);
    cost << 1, 2, 2, 1;
    Assignment a = hungarian(cost);
    CHECK(a.row_to_col[0] == 0);
    CHECK(a.row_to_col[1] == 1);
    CHECK(a.total_cost == doctest::Approx(2.0));

    Eigen::MatrixXd forbidden = Eigen::MatrixXd::Constant(3, 2, kForbidden);
    Assignment empty = hungarian(forbidden);
    CHECK(empty.size() == 0);
    for (int c : empty.row_to_col) CHECK(c == -1);

    Assignment none = hungarian(Eigen::MatrixXd(0, 0));
    CHECK(none.size() == 0);
}

TEST_CASE("hungarian equals brute force on 500 seeded matrices") {
    std::mt19937 rng(123);
    std::uniform_int_distribution<int> dim(1, 7);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const int n = dim(rng), m = dim(rng);
        Eigen::MatrixXd cost(n, m);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < m; ++c)
                cost(r, c) = coin(rng) < 0.2 ? kForbidden : val(rng);
        Assignment a = hungarian(cost);
        auto [best_size, best_cost] = brute_force_best(cost);
        CHECK(a.size() == best_size);
        CHECK(a.total_cost == doctest::Approx(best_cost).epsilon(1e-9));
        // forbidden pairs never assigned; assignment is a partial bijection
        std::set<int> cols;
        for (int r = 0; r < n; ++r)
            if (a.row_to_col[r] >= 0) {
                CHECK(cost(r, a.row_to_col[r]) < kForbidden);
                CHECK(cols.insert(a.row_to_col[r]).second);
            }
    }
}

TEST_CASE("velocity cost closed forms") {
    Track t;
    t.last_observed_box = BBox{0, 0, 2, 2};  // center (1, 1)
    SUBCASE("no velocity estimate") {
        CHECK(velocity_cost(t, det(1, 4, 0, 2, 2)) == 0.0);
    }
    t.velocity_dir = Eigen::Vector2d(1.0, 0.0);
    SUBCASE("straight ahead") {
        CHECK(velocity_cost(t, det(1, 4, 0, 2, 2)) == doctest::Approx(0.0));
    }
    SUBCASE("directly behind") {
        CHECK(velocity_cost(t, det(1, -6, 0, 2, 2)) == doctest::Approx(2.0));
    }
    SUBCASE("45 degrees off") {
        CHECK(velocity_cost(t, det(1, 2, 2, 2, 2)) ==
              doctest::Approx(1.0 - std::sqrt(2.0) / 2.0));
    }
    SUBCASE("zero displacement") {
        CHECK(velocity_cost(t, det(1, 0, 0, 2, 2)) == 0.0);
    }
}

TEST_CASE("association cost formula and gating") {
    TrackerConfig cfg;
    cfg.iou_gate = 0.1;
    cfg.lambda_vel = 0.2;

    Track t;
    t.predicted_box = BBox{0, 0, 4, 4};
    t.last_observed_box = BBox{-1, 0, 4, 4};
    t.velocity_dir = Eigen::Vector2d(1.0, 0.0);

    Detection perfect = det(1, 0, 0, 4, 4);
    // detection straight ahead of the velocity direction: keep center y equal
    {
        std::vector<const Track*> tracks{&t};
        std::vector<const Detection*> dets{&perfect};
        Eigen::MatrixXd cost = association_cost(tracks, dets, cfg);
        CHECK(cost(0, 0) == doctest::Approx(0.0));
    }
    {
        Detection far = det(1, 100, 100, 4, 4);
        std::vector<const Track*> tracks{&t};
        std::vector<const Detection*> dets{&far};
        CHECK(association_cost(tracks, dets, cfg)(0, 0) >= kForbidden);
    }
    // random 3x3 instance matches elementwise re-computation
    std::mt19937 rng(31);
    std::vector<Track> tracks(3);
    std::vector<Detection> dets;
    for (int i = 0; i < 3; ++i) {
        tracks[i].predicted_box = testutil::random_box(rng, 20.0);
        tracks[i].last_observed_box = testutil::random_box(rng, 20.0);
        tracks[i].velocity_dir = Eigen::Vector2d(std::cos(i), std::sin(i));
        dets.push_back(det(1, -10.0 + 7 * i, -10.0 + 5 * i, 10, 12));
    }
    std::vector<const Track*> tp{&tracks[0], &tracks[1], &tracks[2]};
    std::vector<const Detection*> dp{&dets[0], &dets[1], &dets[2]};
    Eigen::MatrixXd cost = association_cost(tp, dp, cfg);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double overlap = iou(tracks[i].predicted_box, dets[j].bbox);
            if (overlap < cfg.iou_gate) {
                CHECK(cost(i, j) >= kForbidden);
            } else {
                const double expect =
                    (1.0 - overlap) + cfg.lambda_vel * velocity_cost(tracks[i], dets[j]);
                CHECK(cost(i, j) == doctest::Approx(expect).epsilon(1e-12));
            }
        }
}

TEST_CASE("exit decision boundary rules") {
    TrackerConfig cfg;
    cfg.image_width = 100;
    cfg.image_height = 80;
    Track t;
    t.predicted_box = BBox{-2, 9, 2, 2};  // center (-1, 10)
    CHECK(exit_decision(t, cfg));
    t.predicted_box = BBox{-1, -1, 2, 2};  // center exactly (0, 0): inclusive
    CHECK(!exit_decision(t, cfg));
    t.predicted_box = BBox{50, 40, 4, 4};
    CHECK(!exit_decision(t, cfg));
    t.predicted_box = BBox{99, 40, 2, 2};  // center (100, 41) = width bound
    CHECK(exit_decision(t, cfg));
}

TEST_CASE("single object tracked without switches") {
    TrackerConfig cfg;
    cfg.image_width = 200;
    cfg.image_height = 200;
    NeuralSort tracker(cfg);
    std::set<int> ids;
    int outputs = 0;
    for (int frame = 1; frame <= 40; ++frame) {
        auto out = tracker.step(frame, {det(frame, 10.0 + frame, 50.0, 8, 8)});
        for (auto& [id, box] : out) {
            ids.insert(id);
            ++outputs;
        }
    }
    CHECK(ids.size() == 1);
    CHECK(outputs == 40 - (cfg.n_init - 1));  // confirmed from the n_init-th hit
    auto tracks = tracker.tracklets();
    REQUIRE(tracks.size() == 1);
    CHECK(tracks[0].entries.front().first == cfg.n_init);
    CHECK(tracks[0].entries.back().first == 40);
}

TEST_CASE("gap beyond max_age kills the track and births a new id") {
    TrackerConfig cfg;
    cfg.max_age = 3;
    cfg.image_width = 500;
    cfg.image_height = 500;
    NeuralSort tracker(cfg);
    for (int frame = 1; frame <= 10; ++frame)
        tracker.step(frame, {det(frame, 100, 100, 10, 10)});
    // silence for max_age + 1 frames
    for (int frame = 11; frame <= 14; ++frame) tracker.step(frame, {});
    for (int frame = 15; frame <= 25; ++frame)
        tracker.step(frame, {det(frame, 100, 100, 10, 10)});
    auto tracks = tracker.tracklets();
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].track_id != tracks[1].track_id);
}

TEST_CASE("decreasing frame index is a sequencing error") {
    NeuralSort tracker(TrackerConfig{});
    tracker.step(5, {});
    CHECK_THROWS_AS(tracker.step(5, {}), DataError);
    CHECK_THROWS_AS(tracker.step(4, {}), DataError);
}

TEST_CASE("crossing objects keep their identities") {
    TrackerConfig cfg;
    cfg.image_width = 400;
    cfg.image_height = 200;
    cfg.use_nkf = true;
    std::mt19937 rng(77);
    auto nkf = kalman::NoiseNet::init(8, 1.0, 1.0, 1.0 / std::hypot(400.0, 200.0), rng);
    NeuralSort tracker(cfg, nkf);

    // A moves right, B moves left, crossing near frame 20 at slightly
    // different heights
    int id_a = -1, id_b = -1;
    for (int frame = 1; frame <= 40; ++frame) {
        const double ax = 10.0 + 5.0 * frame, ay = 90.0;
        const double bx = 210.0 - 5.0 * frame, by = 97.0;
        auto out = tracker.step(frame, {det(frame, ax, ay, 10, 12), det(frame, bx, by, 10, 12)});
        for (auto& [id, box] : out) {
            const bool is_a = std::abs(box.x - ax) < std::abs(box.x - bx);
            if (frame < 15) {  // well before crossing: record identities
                if (is_a) id_a = id;
                else id_b = id;
            } else if (frame > 25) {  // well after: identities must persist
                if (is_a) CHECK(id == id_a);
                else CHECK(id == id_b);
            }
        }
    }
    CHECK(id_a != -1);
    CHECK(id_b != -1);
    CHECK(id_a != id_b);
    CHECK(tracker.tracklets().size() == 2);
}

TEST_CASE("track ids are never reused and unique per frame") {
    TrackerConfig cfg;
    cfg.max_age = 1;
    cfg.n_init = 1;
    cfg.image_width = 1000;
    cfg.image_height = 1000;
    NeuralSort tracker(cfg);
    std::mt19937 rng(9);
    std::set<int> all_ids;
    for (int frame = 1; frame <= 60; ++frame) {
        std::vector<Detection> dets;
        // objects appear and disappear; forces many births/deaths
        for (int k = 0; k < 3; ++k)
            if ((frame + k) % 4 != 0)
                dets.push_back(det(frame, 50.0 + 120.0 * k + frame, 100.0 + 40.0 * k, 10, 10));
        auto out = tracker.step(frame, dets);
        std::set<int> frame_ids;
        for (auto& [id, box] : out) CHECK(frame_ids.insert(id).second);
    }
    for (const auto& t : tracker.tracklets()) CHECK(all_ids.insert(t.track_id).second);
}

TEST_CASE("interpolation fills small gaps only") {
    Tracklet t;
    t.track_id = 1;
    t.entries = {{1, BBox{0, 0, 2, 2}}, {3, BBox{2, 0, 2, 2}}};
    Tracklet filled = interpolate(t, 20);
    REQUIRE(filled.entries.size() == 3);
    CHECK(filled.entries[1].first == 2);
    CHECK(filled.entries[1].second.x == doctest::Approx(1.0));

    Tracklet big;
    big.track_id = 2;
    big.entries = {{1, BBox{0, 0, 2, 2}}, {23, BBox{2, 0, 2, 2}}};
    Tracklet untouched = interpolate(big, 20);  // gap of max_gap + 2
    CHECK(untouched.entries.size() == 2);
}

TEST_CASE("interpolation matches a per-segment lerp oracle") {
    std::mt19937 rng(41);
    Tracklet t;
    t.track_id = 3;
    int frame = 1;
    for (int i = 0; i < 8; ++i) {
        t.entries.emplace_back(frame, testutil::random_box(rng, 50.0));
        frame += 1 + static_cast<int>(rng() % 6);
    }
    const int max_gap = 4;
    Tracklet filled = interpolate(t, max_gap);

    // observed entries unchanged
    for (const auto& [f, b] : t.entries) {
        const BBox* kept = filled.box_at(f);
        REQUIRE(kept != nullptr);
        CHECK(*kept == b);
    }
    // frames strictly increasing
    for (size_t i = 1; i < filled.entries.size(); ++i)
        CHECK(filled.entries[i].first > filled.entries[i - 1].first);
    // every interpolated frame equals the closed-form segment lerp
    for (size_t i = 0; i + 1 < t.entries.size(); ++i) {
        const auto& [f0, b0] = t.entries[i];
        const auto& [f1, b1] = t.entries[i + 1];
        const int gap = f1 - f0;
        for (int f = f0 + 1; f < f1; ++f) {
            const BBox* got = filled.box_at(f);
            if (gap < 2 || gap > max_gap) {
                CHECK(got == nullptr);
            } else {
                REQUIRE(got != nullptr);
                const double a = double(f - f0) / gap;
                CHECK(got->x == doctest::Approx(b0.x + a * (b1.x - b0.x)).epsilon(1e-12));
                CHECK(got->y == doctest::Approx(b0.y + a * (b1.y - b0.y)).epsilon(1e-12));
                CHECK(got->w == doctest::Approx(b0.w + a * (b1.w - b0.w)).epsilon(1e-12));
                CHECK(got->h == doctest::Approx(b0.h + a * (b1.h - b0.h)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("plain IoU-SORT baseline matches the golden file") {
    // byte_mode off, no velocity cost, vanilla filter: a plain IoU-SORT
    TrackerConfig cfg;
    cfg.byte_mode = false;
    cfg.lambda_vel = 0.0;
    cfg.use_exit = false;
    cfg.image_width = 300;
    cfg.image_height = 300;
    NeuralSort tracker(cfg);

    std::mt19937 rng(55);
    std::normal_distribution<double> jitter(0.0, 0.5);
    for (int frame = 1; frame <= 30; ++frame) {
        std::vector<Detection> dets;
        for (int k = 0; k < 3; ++k) {
            if (frame % 7 == 0 && k == 1) continue;  // periodic miss
            const double x = 20.0 + 6.0 * frame * (k == 0) + 2.0 * frame * (k == 1) +
                             4.0 * frame * (k == 2);
            dets.push_back(det(frame, x + jitter(rng), 40.0 + 70.0 * k + jitter(rng), 12, 16));
        }
        tracker.step(frame, dets);
    }
    testutil::TempDir tmp("golden");
    auto out_file = tmp / "sort.txt";
    write_mot(tracker.tracklets(), out_file);

    const std::filesystem::path golden = std::filesystem::path(__FILE__).parent_path() /
                                         "data" / "sort_baseline_golden.txt";
    if (std::getenv("TRACKREF_UPDATE_GOLDEN")) {
        std::filesystem::create_directories(golden.parent_path());
        std::filesystem::copy_file(out_file, golden,
                                   std::filesystem::copy_options::overwrite_existing);
    }
    REQUIRE(std::filesystem::exists(golden));
    std::ifstream got(out_file), want(golden);
    std::stringstream got_ss, want_ss;
    got_ss << got.rdbuf();
    want_ss << want.rdbuf();
    CHECK(got_ss.str() == want_ss.str());
}

#include "scenes.hpp"

#include <algorithm>
#include <set>

namespace testscene {

std::string fixture(const std::string& name) { return std::string(ASMPLAN_FIXTURE_DIR) + "/" + name; }

asmplan::Scene voxel_scene(const std::vector<PieceSpec>& pieces, double voxel_size, double mu, double density) {
    asmplan::Scene scene;
    scene.friction.default_mu = mu;
    for (const auto& p : pieces)
        scene.workpieces.push_back(
            asmplan::make_voxel_piece(p.id, p.cells, voxel_size, asmplan::Pose::from_translation(p.offset), density));
    return scene;
}

asmplan::Scene cube_stack(double size, double mu) {
    return voxel_scene({{"bottom", {{0, 0, 0}}, Vec3::Zero()}, {"top", {{0, 0, 0}}, Vec3(0, 0, size)}}, size, mu);
}

std::vector<Cell> random_polycube(std::mt19937_64& rng, int n) {
    std::set<Cell> cells = {{0, 0, 0}};
    static const int dirs[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    while (static_cast<int>(cells.size()) < n) {
        std::vector<Cell> list(cells.begin(), cells.end());
        const Cell base = list[rng() % list.size()];
        const auto& d = dirs[rng() % 6];
        cells.insert({base[0] + d[0], base[1] + d[1], base[2] + d[2]});
    }
    Cell lo = *cells.begin();
    for (const auto& c : cells)
        for (int k = 0; k < 3; ++k) lo[k] = std::min(lo[k], c[k]);
    std::vector<Cell> out;
    for (const auto& c : cells) out.push_back({c[0] - lo[0], c[1] - lo[1], c[2] - lo[2]});
    return out;
}

asmplan::Scene resting_scene(std::mt19937_64& rng, double voxel_size, double mu) {
    const auto base = random_polycube(rng, 3 + static_cast<int>(rng() % 4));
    const auto piece = random_polycube(rng, 2 + static_cast<int>(rng() % 3));
    const std::set<Cell> occupied(base.begin(), base.end());
    const int dx = static_cast<int>(rng() % 5) - 2, dy = static_cast<int>(rng() % 5) - 2;
    auto clear_at = [&](int dz) {
        for (const auto& c : piece)
            if (occupied.count({c[0] + dx, c[1] + dy, c[2] + dz})) return false;
        return true;
    };
    int dz = 0;
    for (const auto& c : base) dz = std::max(dz, c[2] + 1);
    while (dz > 0 && clear_at(dz - 1)) --dz;
    return voxel_scene({{"base", base, Vec3::Zero()}, {"piece", piece, Vec3(dx, dy, dz) * voxel_size}}, voxel_size, mu);
}

asmplan::Mat3 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

}  // namespace testscene

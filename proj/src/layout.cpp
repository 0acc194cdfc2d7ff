#include "fwdnet/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <unordered_set>

namespace fwdnet {

namespace {

constexpr double kLayoutArea = 1e6;
constexpr int kMaxDepth = 48;

struct QuadTree {
    struct Cell {
        double cx = 0, cy = 0, half = 0; // center and half-extent
        double mass = 0;
        double com_x = 0, com_y = 0;
        std::int32_t children[4] = {-1, -1, -1, -1};
        std::vector<std::uint32_t> bucket; // leaf points
        bool split = false;
    };

    std::vector<Cell> cells;
    std::span<const Vec2> points;

    explicit QuadTree(std::span<const Vec2> pts) : points(pts) {
        double min_x = pts[0].x, max_x = pts[0].x;
        double min_y = pts[0].y, max_y = pts[0].y;
        for (const Vec2& p : pts) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
        Cell root;
        root.cx = (min_x + max_x) / 2;
        root.cy = (min_y + max_y) / 2;
        root.half = std::max({max_x - min_x, max_y - min_y, 1e-12}) / 2;
        cells.push_back(std::move(root));
        for (std::uint32_t i = 0; i < pts.size(); ++i) insert(0, i, 0);
        finalize(0);
    }

    int quadrant(const Cell& cell, const Vec2& p) const {
        return (p.x >= cell.cx ? 1 : 0) | (p.y >= cell.cy ? 2 : 0);
    }

    // Mass and center-of-mass sums accumulate once per cell on the path to
    // the point's leaf.
    void insert(std::int32_t idx, std::uint32_t point, int depth) {
        cells[idx].mass += 1.0;
        cells[idx].com_x += points[point].x;
        cells[idx].com_y += points[point].y;
        if (!cells[idx].split) {
            if (cells[idx].bucket.empty() || depth >= kMaxDepth) {
                cells[idx].bucket.push_back(point);
                return;
            }
            std::vector<std::uint32_t> residents = std::move(cells[idx].bucket);
            cells[idx].bucket.clear();
            cells[idx].split = true;
            for (std::uint32_t moved : residents) insert_into_child(idx, moved, depth);
        }
        insert_into_child(idx, point, depth);
    }

    void insert_into_child(std::int32_t idx, std::uint32_t point, int depth) {
        const int q = quadrant(cells[idx], points[point]);
        std::int32_t child = cells[idx].children[q];
        if (child < 0) {
            Cell fresh;
            const double h = cells[idx].half / 2;
            fresh.cx = cells[idx].cx + ((q & 1) ? h : -h);
            fresh.cy = cells[idx].cy + ((q & 2) ? h : -h);
            fresh.half = h;
            child = static_cast<std::int32_t>(cells.size());
            cells.push_back(std::move(fresh));
            cells[idx].children[q] = child;
        }
        insert(child, point, depth + 1);
    }

    void finalize(std::int32_t idx) {
        Cell& cell = cells[idx];
        if (cell.mass > 0) {
            cell.com_x /= cell.mass;
            cell.com_y /= cell.mass;
        }
        for (std::int32_t child : cell.children)
            if (child >= 0) finalize(child);
    }

    Vec2 force(Vec2 query, double theta, double repulsion) const {
        Vec2 total;
        accumulate(0, query, theta, repulsion, total);
        return total;
    }

    void accumulate(std::int32_t idx, const Vec2& query, double theta, double repulsion,
                    Vec2& total) const {
        const Cell& cell = cells[idx];
        if (cell.mass <= 0) return;
        if (!cell.split) {
            for (std::uint32_t point : cell.bucket) {
                const double dx = query.x - points[point].x;
                const double dy = query.y - points[point].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 == 0.0) continue;
                const double scale = repulsion / d2;
                total.x += scale * dx;
                total.y += scale * dy;
            }
            return;
        }
        const double dx = query.x - cell.com_x;
        const double dy = query.y - cell.com_y;
        const double d2 = dx * dx + dy * dy;
        // conservative opening rule: the cell diagonal is the size measure
        // and the center-of-mass offset is discounted from the distance
        const double diagonal = 2.0 * cell.half * std::numbers::sqrt2;
        const double offset = std::hypot(cell.com_x - cell.cx, cell.com_y - cell.cy);
        if (theta > 0.0 && d2 > 0.0 && std::sqrt(d2) > diagonal / theta + offset) {
            const double scale = cell.mass * repulsion / d2;
            total.x += scale * dx;
            total.y += scale * dy;
            return;
        }
        for (std::int32_t child : cell.children)
            if (child >= 0) accumulate(child, query, theta, repulsion, total);
    }
};

// Deduplicated undirected neighbor lists, self-loops dropped.
std::vector<std::vector<std::uint32_t>> undirected_neighbors(const ForwardGraph& graph) {
    std::vector<std::set<std::uint32_t>> sets(graph.node_count());
    for (const Edge& edge : graph.edges()) {
        if (edge.source == edge.target) continue;
        sets[edge.source].insert(edge.target);
        sets[edge.target].insert(edge.source);
    }
    std::vector<std::vector<std::uint32_t>> adj(graph.node_count());
    for (std::size_t i = 0; i < sets.size(); ++i) adj[i].assign(sets[i].begin(), sets[i].end());
    return adj;
}

void jitter_collisions(std::vector<Vec2>& positions, double scale, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    for (;;) {
        std::set<std::pair<double, double>> seen;
        bool collided = false;
        for (Vec2& p : positions) {
            if (!seen.insert({p.x, p.y}).second) {
                const double a = angle(rng);
                p.x += scale * std::cos(a);
                p.y += scale * std::sin(a);
                collided = true;
            }
        }
        if (!collided) return;
    }
}

} // namespace

void LayoutParams::validate() const {
    if (optimal_distance_scale <= 0 || relative_strength <= 0 || initial_step <= 0 ||
        barnes_hut_theta < 0 || convergence_tolerance <= 0 || max_iterations == 0)
        throw Error(ErrorKind::Config, "layout parameters must be positive");
    if (step_ratio <= 0 || step_ratio >= 1)
        throw Error(ErrorKind::Config, "step_ratio must lie in (0, 1)");
}

Vec2 quadtree_force(std::span<const Vec2> points, Vec2 query, double theta, double repulsion) {
    if (points.empty()) throw Error(ErrorKind::InvalidArgument, "quadtree needs at least one point");
    QuadTree tree(points);
    return tree.force(query, theta, repulsion);
}

Layout yifan_hu(const ForwardGraph& graph, const LayoutParams& params) {
    params.validate();
    const std::size_t n = graph.node_count();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "cannot lay out an empty graph");

    Layout layout;
    layout.coordinates.assign(n, Vec2{});
    if (n == 1) return layout; // single node rests at the origin

    const double side = std::sqrt(kLayoutArea);
    const double k_opt =
        params.optimal_distance_scale * std::sqrt(kLayoutArea / static_cast<double>(n));
    const double repulsion = params.relative_strength * k_opt * k_opt;

    std::mt19937_64 rng(params.seed);
    std::uniform_real_distribution<double> coord(0.0, side);
    for (Vec2& p : layout.coordinates) {
        p.x = coord(rng);
        p.y = coord(rng);
    }
    jitter_collisions(layout.coordinates, 1e-6 * k_opt, rng);

    const auto adj = undirected_neighbors(graph);
    std::vector<Vec2> forces(n);
    double step = params.initial_step;
    int progress = 0;
    double prev_energy = 0.0;

    for (std::uint32_t iteration = 1; iteration <= params.max_iterations; ++iteration) {
        QuadTree tree(layout.coordinates);
        double energy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Vec2 f = tree.force(layout.coordinates[i], params.barnes_hut_theta, repulsion);
            for (std::uint32_t j : adj[i]) {
                const double dx = layout.coordinates[j].x - layout.coordinates[i].x;
                const double dy = layout.coordinates[j].y - layout.coordinates[i].y;
                const double d = std::hypot(dx, dy);
                // attraction d^2 / K along the edge
                f.x += d / k_opt * dx;
                f.y += d / k_opt * dy;
            }
            forces[i] = f;
            energy += f.x * f.x + f.y * f.y;
        }
        if (iteration == 1) {
            layout.initial_energy = energy;
        } else {
            if (prev_energy == 0.0) {
                layout.final_energy = energy;
                break;
            }
            if (std::abs(energy - prev_energy) / prev_energy < params.convergence_tolerance) {
                layout.final_energy = energy;
                break;
            }
            if (energy < prev_energy) {
                if (++progress >= 5) {
                    progress = 0;
                    step /= params.step_ratio;
                }
            } else {
                progress = 0;
                step *= params.step_ratio;
            }
        }
        layout.final_energy = energy;
        for (std::size_t i = 0; i < n; ++i) {
            const double norm = std::hypot(forces[i].x, forces[i].y);
            if (norm == 0.0) continue;
            layout.coordinates[i].x += step * forces[i].x / norm;
            layout.coordinates[i].y += step * forces[i].y / norm;
        }
        layout.iterations_used = iteration;
        prev_energy = energy;
    }

    jitter_collisions(layout.coordinates, 1e-6 * k_opt, rng);
    return layout;
}

} // namespace fwdnet

#include "uavplan/upaop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace uavplan {

void MoeaConfig::validate() const {
    if (population_size < 2 || population_size % 2 != 0)
        throw std::invalid_argument("moea: population size must be even and >= 2");
    if (max_generations < 0) throw std::invalid_argument("moea: negative generation count");
    if (hover_count < 1) throw std::invalid_argument("moea: need at least one hover point");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw std::invalid_argument("moea: crossover probability outside [0, 1]");
    if (mutation_prob > 1.0) throw std::invalid_argument("moea: mutation probability above 1");
}

GenomeLayout make_layout(const Scenario& scenario, int hover_count) {
    const auto m = static_cast<std::size_t>(hover_count);
    const std::size_t n = scenario.devices.size();
    GenomeLayout layout;
    layout.hover_count = m;
    layout.device_count = n;
    layout.lower.resize(4 * m + n);
    layout.upper.resize(4 * m + n);
    const WorldBounds& b = scenario.bounds;
    for (std::size_t j = 0; j < m; ++j) {
        layout.lower[3 * j] = b.x_min;
        layout.upper[3 * j] = b.x_max;
        layout.lower[3 * j + 1] = b.y_min;
        layout.upper[3 * j + 1] = b.y_max;
        layout.lower[3 * j + 2] = b.z_min;
        layout.upper[3 * j + 2] = b.d_max;
    }
    const ChargingConstants& charging = scenario.physics.charging;
    for (std::size_t j = 0; j < m; ++j) {
        layout.lower[3 * m + j] = charging.pc_min;
        layout.upper[3 * m + j] = charging.pc_max;
    }
    const CommConstants& comm = scenario.physics.comm;
    for (std::size_t i = 0; i < n; ++i) {
        layout.lower[4 * m + i] = comm.pt_min;
        layout.upper[4 * m + i] = comm.pt_max;
    }
    return layout;
}

std::vector<double> flatten(const HoverPlan& plan) {
    std::vector<double> genes;
    genes.reserve(4 * plan.points.size() + plan.device_powers.size());
    for (const Vec3& q : plan.points) {
        genes.push_back(q.x);
        genes.push_back(q.y);
        genes.push_back(q.z);
    }
    genes.insert(genes.end(), plan.charge_powers.begin(), plan.charge_powers.end());
    genes.insert(genes.end(), plan.device_powers.begin(), plan.device_powers.end());
    return genes;
}

HoverPlan unflatten(std::span<const double> genes, const GenomeLayout& layout) {
    if (genes.size() != layout.size()) throw std::invalid_argument("unflatten: genome length mismatch");
    HoverPlan plan;
    const std::size_t m = layout.hover_count;
    plan.points.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        plan.points[j] = {genes[3 * j], genes[3 * j + 1], genes[3 * j + 2]};
    }
    plan.charge_powers.assign(genes.begin() + 3 * m, genes.begin() + 4 * m);
    plan.device_powers.assign(genes.begin() + 4 * m, genes.end());
    return plan;
}

void repair_altitude(HoverPlan& plan, const Scenario& scenario, double margin) {
    for (Vec3& q : plan.points) {
        const double terrain = obstacle_height(scenario.obstacles, q.x, q.y);
        if (q.z < terrain + margin) q.z = std::min(terrain + margin, scenario.bounds.d_max);
    }
}

std::vector<Vec3> kmeans_centers(const Scenario& scenario, int cluster_count, Rng& rng, int max_iters) {
    const std::size_t n = scenario.devices.size();
    const auto m = static_cast<std::size_t>(cluster_count);
    if (m < 1 || m > n) throw std::invalid_argument("kmeans: cluster count outside [1, N]");

    // Forgy start: m distinct device positions.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::swap(order[i], order[i + uniform_index(rng, n - i)]);
    }
    std::vector<Vec3> centers(m);
    for (std::size_t j = 0; j < m; ++j) {
        const WirelessDevice& d = scenario.devices[order[j]];
        centers[j] = {d.x, d.y, 0.0};
    }

    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const WirelessDevice& d = scenario.devices[i];
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                const double dx = d.x - centers[j].x;
                const double dy = d.y - centers[j].y;
                const double d2 = dx * dx + dy * dy;
                if (d2 < best_d2) {
                    best = static_cast<int>(j);
                    best_d2 = d2;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;  // assignment fixpoint

        std::vector<double> sx(m, 0.0), sy(m, 0.0);
        std::vector<int> count(m, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = static_cast<std::size_t>(assignment[i]);
            sx[j] += scenario.devices[i].x;
            sy[j] += scenario.devices[i].y;
            ++count[j];
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (count[j] == 0) {  // reseed empty cluster at a random device
                const WirelessDevice& d = scenario.devices[uniform_index(rng, n)];
                centers[j] = {d.x, d.y, 0.0};
            } else {
                centers[j] = {sx[j] / count[j], sy[j] / count[j], 0.0};
            }
        }
    }
    return centers;
}

std::vector<Vec3> kmeans_seed(const Scenario& scenario, int hover_count, Rng& rng, const MoeaConfig& config) {
    std::vector<Vec3> points = kmeans_centers(scenario, hover_count, rng, config.kmeans_max_iters);
    for (Vec3& q : points) {
        q.z = uniform(rng, scenario.bounds.z_min, scenario.bounds.d_max);
        const double terrain = obstacle_height(scenario.obstacles, q.x, q.y);
        if (q.z < terrain + config.altitude_margin)
            q.z = std::min(terrain + config.altitude_margin, scenario.bounds.d_max);
    }
    return points;
}

namespace {

HoverPlan random_plan(const GenomeLayout& layout, Rng& rng) {
    std::vector<double> genes(layout.size());
    for (std::size_t g = 0; g < genes.size(); ++g) {
        genes[g] = uniform(rng, layout.lower[g], layout.upper[g]);
    }
    return unflatten(genes, layout);
}

Individual make_individual(HoverPlan plan, const Scenario& scenario, const ObjectiveParams& params) {
    Individual ind;
    ind.genome = std::move(plan);
    ind.objectives = evaluate_plan(ind.genome, scenario, params).objectives;
    return ind;
}

}  // namespace

Population initialize_population(const Scenario& scenario, const MoeaConfig& config) {
    config.validate();
    const GenomeLayout layout = make_layout(scenario, config.hover_count);
    Population pop;
    pop.individuals.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        Rng rng(sub_seed(config.seed, static_cast<std::uint64_t>(i)));
        HoverPlan plan;
        if (config.kmeans_init) {
            plan.points = kmeans_seed(scenario, config.hover_count, rng, config);
            plan.charge_powers.resize(static_cast<std::size_t>(config.hover_count));
            for (double& pc : plan.charge_powers)
                pc = uniform(rng, scenario.physics.charging.pc_min, scenario.physics.charging.pc_max);
            plan.device_powers.resize(scenario.devices.size());
            for (double& pt : plan.device_powers)
                pt = uniform(rng, scenario.physics.comm.pt_min, scenario.physics.comm.pt_max);
        } else {
            plan = random_plan(layout, rng);
            repair_altitude(plan, scenario, config.altitude_margin);
        }
        pop.individuals.push_back(make_individual(std::move(plan), scenario, config.objective));
    }
    return pop;
}

std::vector<std::vector<int>> fast_nondominated_sort(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<int>> dominated(n);
    std::vector<int> domination_count(n, 0);
    std::vector<std::vector<int>> fronts;

    std::vector<int> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) continue;
            if (dominates(objectives[p], objectives[q])) {
                dominated[p].push_back(static_cast<int>(q));
            } else if (dominates(objectives[q], objectives[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) current.push_back(static_cast<int>(p));
    }
    while (!current.empty()) {
        fronts.push_back(current);
        std::vector<int> next;
        for (int p : current) {
            for (int q : dominated[static_cast<std::size_t>(p)]) {
                if (--domination_count[static_cast<std::size_t>(q)] == 0) next.push_back(q);
            }
        }
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const int> front, std::span<const ObjectiveVector> objectives) {
    if (front.empty()) throw std::invalid_argument("crowding_distance: empty front");
    const std::size_t size = front.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> crowd(size, 0.0);
    if (size <= 2) {
        std::fill(crowd.begin(), crowd.end(), inf);
        return crowd;
    }
    const std::size_t objective_count = objectives[static_cast<std::size_t>(front[0])].values.size();
    std::vector<std::size_t> order(size);
    for (std::size_t m = 0; m < objective_count; ++m) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return objectives[static_cast<std::size_t>(front[a])].values[m] <
                   objectives[static_cast<std::size_t>(front[b])].values[m];
        });
        const double lo = objectives[static_cast<std::size_t>(front[order.front()])].values[m];
        const double hi = objectives[static_cast<std::size_t>(front[order.back()])].values[m];
        crowd[order.front()] = inf;
        crowd[order.back()] = inf;
        if (hi <= lo) continue;  // degenerate objective, no interior spread
        for (std::size_t i = 1; i + 1 < size; ++i) {
            if (crowd[order[i]] == inf) continue;
            const double prev = objectives[static_cast<std::size_t>(front[order[i - 1]])].values[m];
            const double next = objectives[static_cast<std::size_t>(front[order[i + 1]])].values[m];
            crowd[order[i]] += (next - prev) / (hi - lo);
        }
    }
    return crowd;
}

namespace {

// Crowded-comparison winner of a binary tournament; ties keep the first draw.
const Individual& tournament(const Population& pop, Rng& rng) {
    const Individual& a = pop.individuals[uniform_index(rng, pop.individuals.size())];
    const Individual& b = pop.individuals[uniform_index(rng, pop.individuals.size())];
    if (b.rank < a.rank) return b;
    if (a.rank == b.rank && b.crowding > a.crowding) return b;
    return a;
}

void sbx_crossover(std::vector<double>& c1, std::vector<double>& c2, const GenomeLayout& layout,
                   double eta, Rng& rng) {
    for (std::size_t g = 0; g < c1.size(); ++g) {
        if (unit_uniform(rng) > 0.5) continue;
        const double x1 = c1[g];
        const double x2 = c2[g];
        if (std::abs(x1 - x2) < 1e-14) continue;  // identical genes pass through exactly
        const double u = unit_uniform(rng);
        const double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                                     : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
        double y1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2);
        double y2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2);
        if (unit_uniform(rng) < 0.5) std::swap(y1, y2);
        c1[g] = clamp(y1, layout.lower[g], layout.upper[g]);
        c2[g] = clamp(y2, layout.lower[g], layout.upper[g]);
    }
}

void polynomial_mutation(std::vector<double>& genes, const GenomeLayout& layout, double prob,
                         double eta, Rng& rng) {
    for (std::size_t g = 0; g < genes.size(); ++g) {
        if (unit_uniform(rng) >= prob) continue;
        const double lo = layout.lower[g];
        const double hi = layout.upper[g];
        const double range = hi - lo;
        if (range <= 0.0) continue;
        const double x = genes[g];
        const double u = unit_uniform(rng);
        double delta;
        if (u < 0.5) {
            const double d1 = (x - lo) / range;
            delta = std::pow(2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0), 1.0 / (eta + 1.0)) - 1.0;
        } else {
            const double d2 = (hi - x) / range;
            delta = 1.0 - std::pow(2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0),
                                   1.0 / (eta + 1.0));
        }
        genes[g] = clamp(x + delta * range, lo, hi);
    }
}

}  // namespace

std::vector<HoverPlan> vary(const Population& parents, const Scenario& scenario,
                            const GenomeLayout& layout, const MoeaConfig& config, Rng& rng) {
    const double mutation_prob =
        config.mutation_prob >= 0.0 ? config.mutation_prob : 1.0 / static_cast<double>(layout.size());
    std::vector<HoverPlan> offspring;
    offspring.reserve(parents.individuals.size());
    while (offspring.size() < parents.individuals.size()) {
        std::vector<double> c1 = flatten(tournament(parents, rng).genome);
        std::vector<double> c2 = flatten(tournament(parents, rng).genome);
        if (unit_uniform(rng) < config.crossover_prob) {
            sbx_crossover(c1, c2, layout, config.crossover_eta, rng);
        }
        for (std::vector<double>* child : {&c1, &c2}) {
            polynomial_mutation(*child, layout, mutation_prob, config.mutation_eta, rng);
            HoverPlan plan = unflatten(*child, layout);
            repair_altitude(plan, scenario, config.altitude_margin);
            offspring.push_back(std::move(plan));
            if (offspring.size() == parents.individuals.size()) break;
        }
    }
    return offspring;
}

namespace {

// Non-dominated sort + crowding over `pool`, elite truncation to `target`.
std::vector<Individual> environmental_selection(std::vector<Individual>& pool, std::size_t target) {
    std::vector<ObjectiveVector> objectives;
    objectives.reserve(pool.size());
    for (const Individual& ind : pool) objectives.push_back(ind.objectives);
    const auto fronts = fast_nondominated_sort(objectives);

    std::vector<Individual> next;
    next.reserve(target);
    for (std::size_t f = 0; f < fronts.size() && next.size() < target; ++f) {
        const auto& front = fronts[f];
        const std::vector<double> crowd = crowding_distance(front, objectives);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
        for (std::size_t i : order) {
            if (next.size() == target) break;
            Individual ind = pool[static_cast<std::size_t>(front[i])];
            ind.rank = static_cast<int>(f) + 1;
            ind.crowding = crowd[i];
            next.push_back(std::move(ind));
        }
    }
    return next;
}

std::vector<Individual> first_front(const std::vector<Individual>& pop) {
    std::vector<Individual> front;
    for (const Individual& ind : pop) {
        if (ind.rank == 1) front.push_back(ind);
    }
    return front;
}

}  // namespace

EvolveResult evolve(const Scenario& scenario, const MoeaConfig& config) {
    config.validate();
    const GenomeLayout layout = make_layout(scenario, config.hover_count);
    Rng rng(sub_seed(config.seed, 0x5eedULL));

    Population pop = initialize_population(scenario, config);
    pop.individuals = environmental_selection(pop.individuals, pop.individuals.size());

    EvolveResult result;
    auto record = [&result](const std::vector<Individual>& individuals) {
        const std::vector<Individual> front = first_front(individuals);
        double best_f1 = -std::numeric_limits<double>::infinity();
        double best_f2 = std::numeric_limits<double>::infinity();
        std::vector<std::array<double, 2>> snapshot;
        snapshot.reserve(front.size());
        for (const Individual& ind : front) {
            best_f1 = std::max(best_f1, ind.f1());
            best_f2 = std::min(best_f2, ind.f2());
            snapshot.push_back({ind.f1(), ind.f2()});
        }
        result.best_f1_trace.push_back(best_f1);
        result.best_f2_trace.push_back(best_f2);
        result.front_snapshots.push_back(std::move(snapshot));
    };
    record(pop.individuals);

    for (int gen = 1; gen <= config.max_generations; ++gen) {
        std::vector<HoverPlan> offspring = vary(pop, scenario, layout, config, rng);
        std::vector<Individual> pool = pop.individuals;
        pool.reserve(pool.size() + offspring.size());
        for (HoverPlan& plan : offspring) {
            pool.push_back(make_individual(std::move(plan), scenario, config.objective));
        }
        pop.individuals = environmental_selection(pool, static_cast<std::size_t>(config.population_size));
        pop.generation = gen;
        record(pop.individuals);
    }
    result.front = first_front(pop.individuals);
    return result;
}

HoverPlan baseline_us(const Scenario& scenario, int hover_count) {
    // Near-square factorization r x c with the larger factor along x.
    int rows = 1;
    for (int a = static_cast<int>(std::sqrt(static_cast<double>(hover_count))); a >= 1; --a) {
        if (hover_count % a == 0) {
            rows = a;
            break;
        }
    }
    const int cols = hover_count / rows;
    const WorldBounds& b = scenario.bounds;
    HoverPlan plan;
    plan.points.reserve(static_cast<std::size_t>(hover_count));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            plan.points.push_back({b.x_min + (c + 0.5) * b.width() / cols,
                                   b.y_min + (r + 0.5) * b.depth() / rows, b.z_min});
        }
    }
    plan.charge_powers.assign(static_cast<std::size_t>(hover_count), scenario.physics.charging.pc_max);
    plan.device_powers.assign(scenario.devices.size(), scenario.physics.comm.pt_max);
    return plan;
}

HoverPlan baseline_rs(const Scenario& scenario, int hover_count, std::uint64_t seed) {
    Rng rng(seed);
    const WorldBounds& b = scenario.bounds;
    HoverPlan plan;
    plan.points.reserve(static_cast<std::size_t>(hover_count));
    for (int j = 0; j < hover_count; ++j) {
        plan.points.push_back({uniform(rng, b.x_min, b.x_max), uniform(rng, b.y_min, b.y_max),
                               uniform(rng, b.z_min, b.d_max)});
    }
    plan.charge_powers.assign(static_cast<std::size_t>(hover_count), scenario.physics.charging.pc_max);
    plan.device_powers.assign(scenario.devices.size(), scenario.physics.comm.pt_max);
    return plan;
}

HoverPlan baseline_kmeans(const Scenario& scenario, int hover_count, std::uint64_t seed) {
    Rng rng(seed);
    HoverPlan plan;
    plan.points = kmeans_centers(scenario, hover_count, rng);
    for (Vec3& q : plan.points) q.z = scenario.bounds.z_min;
    plan.charge_powers.assign(static_cast<std::size_t>(hover_count), scenario.physics.charging.pc_max);
    plan.device_powers.assign(scenario.devices.size(), scenario.physics.comm.pt_max);
    return plan;
}

const Individual& select_solution(std::span<const Individual> front, Strategy strategy) {
    if (front.empty()) throw std::invalid_argument("select_solution: empty front");
    const Individual* best = &front[0];
    for (const Individual& ind : front.subspan(1)) {
        if (strategy == Strategy::CoverageMax) {
            if (ind.f1() > best->f1() || (ind.f1() == best->f1() && ind.f2() < best->f2())) best = &ind;
        } else {
            if (ind.f2() < best->f2() || (ind.f2() == best->f2() && ind.f1() > best->f1())) best = &ind;
        }
    }
    return *best;
}

}  // namespace uavplan

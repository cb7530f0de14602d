#include "minav/goal_set.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "minav/error.hpp"

namespace minav {

GoalSet build_goal_set(const OfflineDataset& dataset, double delta_ssd) {
    if (dataset.empty()) throw Error(ErrorCode::empty_dataset, "cannot build goals from empty dataset");
    GoalSet goals;
    goals.threshold = delta_ssd;
    for (std::size_t e = 0; e < dataset.episode_count(); ++e) {
        const auto& ep = dataset.episode(e);
        for (std::size_t t = 0; t < ep.length(); ++t) {
            if (static_cast<double>(ep.ssd(t)) > delta_ssd) {
                goals.indices.push_back({static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(t)});
            }
        }
    }
    if (goals.empty()) {
        throw Error(ErrorCode::empty_goal_set, "no observation has SSD above the threshold");
    }
    return goals;
}

void write_goal_set(std::ostream& os, const GoalSet& goals) {
    os.precision(17);
    os << "# threshold=" << goals.threshold << '\n';
    for (const auto& g : goals.indices) os << g.episode << ',' << g.step << '\n';
}

GoalSet read_goal_set(std::istream& is) {
    GoalSet goals;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line.rfind("# threshold=", 0) == 0) {
            goals.threshold = std::stod(line.substr(12));
            header = true;
            continue;
        }
        if (line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorCode::format_error, "bad goal line: " + line);
        goals.indices.push_back({static_cast<std::uint32_t>(std::stoul(line.substr(0, comma))),
                                 static_cast<std::uint32_t>(std::stoul(line.substr(comma + 1)))});
    }
    if (!header) throw Error(ErrorCode::format_error, "goal set file lacks threshold header");
    if (goals.empty()) throw Error(ErrorCode::empty_goal_set, "goal set file is empty");
    return goals;
}

void save_goal_set(const GoalSet& goals, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    write_goal_set(out, goals);
}

GoalSet load_goal_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path);
    return read_goal_set(in);
}

}  // namespace minav

#include "hackint/report.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

namespace hackint {

namespace {

json vector_to_json(const VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

} // namespace

json interval_to_json(const HackingInterval& iv) {
    json j;
    j["lower"] = iv.lower;
    j["upper"] = iv.upper;
    j["stat_at_min_loss"] = iv.stat_at_min_loss;
    j["theta"] = iv.theta;
    j["witness_layout"] = iv.witness_layout;
    j["witness_lower"] = vector_to_json(iv.witness_lower);
    j["witness_upper"] = vector_to_json(iv.witness_upper);
    return j;
}

json svm_result_to_json(const SvmIntervalResult& res) {
    json j = interval_to_json(res.interval);
    j["min_loss"] = res.min_loss;
    j["degraded"] = res.degraded;
    j["duality_gap_lower"] = res.gap_lower;
    j["duality_gap_upper"] = res.gap_upper;
    j["baseline_lambda"] = vector_to_json(res.baseline.lambda);
    j["baseline_lambda0"] = res.baseline.lambda0;
    return j;
}

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

json provenance_json(std::uint64_t seed, const std::string& config_canonical, bool deterministic) {
    json j;
    j["seed"] = seed;
    j["version"] = kToolVersion;
    j["config_hash"] = hex64(fnv1a64(config_canonical));
    if (!deterministic) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t t = std::chrono::system_clock::to_time_t(now);
        std::ostringstream os;
        os << std::put_time(std::gmtime(&t), "%FT%TZ");
        j["timestamp"] = os.str();
    }
    return j;
}

json report_skeleton(const std::string& command, std::uint64_t seed,
                     const std::string& config_canonical, bool deterministic) {
    json j;
    j["schema"] = kReportSchemaVersion;
    j["command"] = command;
    j["provenance"] = provenance_json(seed, config_canonical, deterministic);
    return j;
}

} // namespace hackint

#include "dezlab/metrics/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dezlab::metrics {

int farthest_distance(std::span<const Cell> trajectory, Cell spawn) {
  int best = 0;
  for (const Cell& c : trajectory)
    best = std::max(best, gridworlds::manhattan(c, spawn));
  return best;
}

std::vector<std::int64_t> unique_states_per_window(
    const std::vector<int>& unique_delta_per_episode, int window) {
  if (window <= 0) throw std::invalid_argument("window must be > 0");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < unique_delta_per_episode.size(); ++i) {
    if (i % window == 0) out.push_back(0);
    out.back() += unique_delta_per_episode[i];
  }
  return out;
}

ConvergenceStat convergence(const std::vector<double>& rewards, int window) {
  ConvergenceStat stat;
  stat.window = window;
  const int n = static_cast<int>(rewards.size());
  if (n < window) return stat;  // unavailable

  stat.available = true;
  double tail = 0.0;
  for (int i = n - window; i < n; ++i) tail += rewards[i];
  stat.final_avg = tail / window;

  const double threshold = 0.9 * stat.final_avg;
  double acc = 0.0;
  for (int e = 0; e < n; ++e) {
    acc += rewards[e];
    if (e >= window) acc -= rewards[e - window];
    const int span = std::min(e + 1, window);
    if (acc / span >= threshold) {
      stat.episodes_to_90 = e;
      break;
    }
  }
  return stat;
}

SeriesStats across_seeds(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to aggregate");
  const std::size_t len = runs.front().size();
  for (const auto& r : runs)
    if (r.size() != len)
      throw std::invalid_argument("cannot aggregate runs of unequal length");

  SeriesStats s;
  s.mean.assign(len, 0.0);
  s.stddev.assign(len, 0.0);
  for (std::size_t i = 0; i < len; ++i) {
    double m = 0.0;
    for (const auto& r : runs) m += r[i];
    m /= static_cast<double>(runs.size());
    double v = 0.0;
    for (const auto& r : runs) v += (r[i] - m) * (r[i] - m);
    s.mean[i] = m;
    s.stddev[i] = runs.size() > 1
                      ? std::sqrt(v / static_cast<double>(runs.size() - 1))
                      : 0.0;
  }
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("double format failed");
  return std::string(buf, ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::runtime_error("bad double in CSV: " + s);
  return v;
}

std::string encode_zg(const std::map<std::pair<int, int>, int>& hist) {
  std::string out;
  bool first = true;
  for (const auto& [zg, count] : hist) {
    if (!first) out += ';';
    first = false;
    out += std::to_string(zg.first) + ':' + std::to_string(zg.second) + ':' +
           std::to_string(count);
  }
  return out;
}

std::map<std::pair<int, int>, int> decode_zg(const std::string& s) {
  std::map<std::pair<int, int>, int> hist;
  if (s.empty()) return hist;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';')) {
    int z = 0, g = 0, c = 0;
    if (std::sscanf(item.c_str(), "%d:%d:%d", &z, &g, &c) != 3)
      throw std::runtime_error("bad zg histogram entry: " + item);
    hist[{z, g}] = c;
  }
  return hist;
}

}  // namespace

const char* const kCsvHeader =
    "run_id,seed,episode,reward,steps,unique_delta,farthest,epsilon,"
    "first_corridor,first_red,first_key,first_door,first_goal,zg_hist";

std::string to_csv_row(const EpisodeRecord& r) {
  std::string row = r.run_id;
  row += ',' + std::to_string(r.seed);
  row += ',' + std::to_string(r.episode);
  row += ',' + format_double(r.reward_ext);
  row += ',' + std::to_string(r.steps);
  row += ',' + std::to_string(r.unique_delta);
  row += ',' + std::to_string(r.farthest);
  row += ',' + format_double(r.epsilon);
  for (int e = 0; e < gridworlds::kEventCount; ++e)
    row += ',' + std::to_string(r.first_event_step[e]);
  row += ',' + encode_zg(r.zg_hist);
  return row;
}

EpisodeRecord from_csv_row(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cols.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cols.push_back(cur);
  if (cols.size() != 14)
    throw std::runtime_error("bad CSV row (" + std::to_string(cols.size()) +
                             " columns)");

  EpisodeRecord r;
  r.run_id = cols[0];
  r.seed = std::stoull(cols[1]);
  r.episode = std::stoi(cols[2]);
  r.reward_ext = parse_double(cols[3]);
  r.steps = std::stoi(cols[4]);
  r.unique_delta = std::stoi(cols[5]);
  r.farthest = std::stoi(cols[6]);
  r.epsilon = parse_double(cols[7]);
  for (int e = 0; e < gridworlds::kEventCount; ++e)
    r.first_event_step[e] = std::stoi(cols[8 + e]);
  r.zg_hist = decode_zg(cols[13]);
  return r;
}

void write_csv(const std::string& path,
               const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open CSV for write: " + path);
  out << kCsvHeader << '\n';
  for (const EpisodeRecord& r : records) out << to_csv_row(r) << '\n';
  if (!out) throw std::runtime_error("CSV write failed: " + path);
}

std::vector<EpisodeRecord> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("bad CSV header in " + path);
  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(from_csv_row(line));
  }
  return records;
}

}  // namespace dezlab::metrics

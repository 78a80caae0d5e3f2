#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

#include "spuct/envs.hpp"

namespace spuct {

namespace {

// Keep in sync with layouts/*.txt (tests compare them).
constexpr std::string_view kFrozenLake4 =
    "S...\n"
    ".H.H\n"
    "...H\n"
    "H..G\n";

constexpr std::string_view kFrozenLake8 =
    "S.......\n"
    "........\n"
    "...H....\n"
    ".....H..\n"
    "...H....\n"
    ".HH...H.\n"
    ".H..H.H.\n"
    "...H...G\n";

constexpr std::string_view kTaxi =
    "S..W..G\n"
    ".W.W.W.\n"
    ".W...W.\n"
    ".WWW.W.\n"
    ".......\n"
    "P.WPW.P\n";

int find_unique(const GridLayout& layout, char c, const char* what) {
  const auto n = std::count(layout.cells.begin(), layout.cells.end(), c);
  if (n != 1) throw std::invalid_argument(std::string("layout must contain exactly one ") + what);
  return static_cast<int>(layout.cells.find(c));
}

}  // namespace

GridLayout parse_layout(std::string_view text) {
  GridLayout layout;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(pos, end - pos);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    pos = end + 1;
    if (row.empty()) continue;
    if (layout.width == 0) {
      layout.width = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != layout.width) {
      throw std::invalid_argument("layout rows must all have the same width");
    }
    for (char c : row) {
      switch (c) {
        case 'S': case 'G': case 'H': case 'W': case 'P': case '.':
          layout.cells.push_back(c);
          break;
        case 'F':
          layout.cells.push_back('.');
          break;
        default:
          throw std::invalid_argument(std::string("unknown layout cell '") + c + "'");
      }
    }
    ++layout.height;
  }
  if (layout.width == 0) throw std::invalid_argument("empty layout");
  return layout;
}

GridLayout load_layout(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str());
}

const GridLayout& frozenlake4_layout() {
  static const GridLayout layout = parse_layout(kFrozenLake4);
  return layout;
}

const GridLayout& frozenlake8_layout() {
  static const GridLayout layout = parse_layout(kFrozenLake8);
  return layout;
}

const GridLayout& taxi_layout() {
  static const GridLayout layout = parse_layout(kTaxi);
  return layout;
}

// ---------------------------------------------------------------------------

GridModel::GridModel(GridLayout layout, std::vector<std::vector<double>> slip, double gamma, int step_cap)
    : layout_(std::move(layout)), slip_(std::move(slip)), gamma_(gamma), step_cap_(step_cap) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("grid: gamma must lie in [0, 1]");
  if (step_cap < 1) throw std::invalid_argument("grid: step_cap must be >= 1");
  start_cell_ = find_unique(layout_, 'S', "start cell 'S'");
}

int GridModel::move(int cell, Action direction) const {
  int x = cell % layout_.width;
  int y = cell / layout_.width;
  int nx = x;
  int ny = y;
  switch (direction) {
    case kLeft: nx = x - 1; break;
    case kDown: ny = y + 1; break;
    case kRight: nx = x + 1; break;
    case kUp: ny = y - 1; break;
    default: throw std::invalid_argument("grid: invalid action");
  }
  if (nx < 0 || ny < 0 || nx >= layout_.width || ny >= layout_.height) return cell;
  if (layout_.at(nx, ny) == 'W') return cell;
  return ny * layout_.width + nx;
}

StepResult GridModel::sample(State s, Action a, Rng& rng) const {
  if (a >= 4) throw std::invalid_argument("grid: invalid action");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const std::vector<double>& row = slip_[a];
  double acc = 0.0;
  Action direction = 3;
  for (Action d = 0; d < 4; ++d) {
    acc += row[d];
    if (u < acc) {
      direction = d;
      break;
    }
  }
  // Rounding in the cumulative sum can leave u >= acc; fall back to the last positive entry.
  if (u >= acc) {
    while (direction > 0 && row[direction] == 0.0) --direction;
  }
  return resolve(s, direction);
}

std::vector<Outcome> GridModel::transitions(State s, Action a) const {
  if (a >= 4) throw std::invalid_argument("grid: invalid action");
  std::vector<Outcome> out;
  for (Action d = 0; d < 4; ++d) {
    const double prob = slip_[a][d];
    if (prob == 0.0) continue;
    const StepResult r = resolve(s, d);
    auto same = std::find_if(out.begin(), out.end(), [&](const Outcome& o) { return o.next == r.next; });
    if (same != out.end()) {
      same->probability += prob;
    } else {
      out.push_back({r.next, prob, r.reward, r.terminal});
    }
  }
  // Rewards are deterministic given the next state, so merged outcomes keep theirs.
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<double>> frozenlake_slip() {
  std::vector<std::vector<double>> slip(4, std::vector<double>(4, 0.0));
  for (Action a = 0; a < 4; ++a) {
    slip[a][(a + 3) % 4] = 1.0 / 3.0;
    slip[a][a] = 1.0 / 3.0;
    slip[a][(a + 1) % 4] = 1.0 / 3.0;
  }
  return slip;
}

std::vector<std::vector<double>> taxi_slip() {
  std::vector<std::vector<double>> slip(4, std::vector<double>(4, 1.0 / 6.0));
  for (Action a = 0; a < 4; ++a) slip[a][a] = 0.5;
  return slip;
}

}  // namespace

FrozenLake::FrozenLake(GridLayout layout, double gamma, int step_cap)
    : GridModel(std::move(layout), frozenlake_slip(), gamma, step_cap) {
  find_unique(layout_, 'G', "goal cell 'G'");
}

std::string FrozenLake::name() const {
  if (layout_.width == layout_.height && (layout_.width == 4 || layout_.width == 8)) {
    return "frozenlake" + std::to_string(layout_.width);
  }
  return "frozenlake_" + std::to_string(layout_.width) + "x" + std::to_string(layout_.height);
}

bool FrozenLake::is_terminal(State s) const {
  const char c = layout_.cells[s];
  return c == 'H' || c == 'G';
}

StepResult FrozenLake::resolve(State s, Action direction) const {
  const int next = move(static_cast<int>(s), direction);
  const char c = layout_.cells[static_cast<std::size_t>(next)];
  return {static_cast<State>(next), c == 'G' ? 1.0 : 0.0, c == 'H' || c == 'G'};
}

Taxi::Taxi(GridLayout layout, double gamma, int step_cap)
    : GridModel(std::move(layout), taxi_slip(), gamma, step_cap) {
  find_unique(layout_, 'G', "target cell 'G'");
  for (int i = 0; i < static_cast<int>(layout_.cells.size()); ++i) {
    if (layout_.cells[static_cast<std::size_t>(i)] == 'P') passengers_.push_back(i);
  }
  if (passengers_.size() > 16) throw std::invalid_argument("taxi: at most 16 passengers");
}

bool Taxi::is_terminal(State s) const {
  return layout_.cells[static_cast<std::size_t>(cell_of(s))] == 'G';
}

StepResult Taxi::resolve(State s, Action direction) const {
  const int next = move(cell_of(s), direction);
  unsigned mask = mask_of(s);
  for (std::size_t i = 0; i < passengers_.size(); ++i) {
    if (passengers_[i] == next) mask |= 1u << i;
  }
  const bool done = layout_.cells[static_cast<std::size_t>(next)] == 'G';
  return {encode(next, mask), done ? static_cast<double>(std::popcount(mask)) : 0.0, done};
}

std::unique_ptr<FrozenLake> build_frozenlake(FrozenLakeSize size, double gamma, int step_cap) {
  return std::make_unique<FrozenLake>(size == FrozenLakeSize::k4x4 ? frozenlake4_layout() : frozenlake8_layout(), gamma, step_cap);
}

std::unique_ptr<Taxi> build_taxi(double gamma, int step_cap) {
  return std::make_unique<Taxi>(taxi_layout(), gamma, step_cap);
}

}  // namespace spuct

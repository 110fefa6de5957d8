// Command-line driver: convergence studies and verification runs.
//
//   mixfem study  --k 3 --levels 5 [--mu 0.5] [--lambda 1] [--format text|csv|json]
//                 [--out PATH] [--dump-system PATH] [--threads N] [--diagonal sw-ne|se-nw]
//   mixfem verify --k 3 --level 2 [--corrupt flipped-restriction-sign|misaligned-bubble]
//                 [--out PATH] [--no-infsup]
//
// Exit codes: 0 success, 1 solver or verification failure, 2 usage error.

#include <mixfem/mixfem.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct StudyArgs {
  int k = 3;
  int levels = 1;
  double mu = 0.5;
  double lambda = 1.0;
  std::string format = "text";
  std::string out;
  std::string dump;
  int threads = 1;
  mixfem::Diagonal diagonal = mixfem::Diagonal::south_west_north_east;
};

struct VerifyArgs {
  int k = 3;
  int level = 1;
  mixfem::Corruption corruption = mixfem::Corruption::none;
  std::string out;
  bool no_infsup = false;
};

// Writes to the file at `path`, or stdout when empty. Returns false if the file cannot be opened.
bool emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot open " << path << " for writing\n";
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

int run_study(const StudyArgs& a) {
  mixfem::StudyOptions opts;
  opts.mu = a.mu;
  opts.lambda = a.lambda;
  opts.diagonal = a.diagonal;
  opts.assembly.threads = a.threads;
  if (!a.dump.empty()) {
    opts.on_level = [&](const mixfem::Mesh& mesh, const mixfem::SaddleSystem& sys, const mixfem::ErrorReport&) {
      if (mesh.level != a.levels) return;
      std::ofstream km(a.dump);
      std::ofstream rhs(a.dump + ".rhs");
      if (!km || !rhs) throw std::runtime_error("cannot open " + a.dump + " for writing");
      mixfem::write_matrix_market(km, sys.kkt());
      mixfem::write_matrix_market(rhs, sys.rhs());
    };
  }

  mixfem::ConvergenceTable table;
  try {
    table = mixfem::run_study(a.k, a.levels, opts);
  } catch (const mixfem::SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  std::ostringstream os;
  if (a.format == "csv") {
    mixfem::write_csv(os, table);
  } else if (a.format == "json") {
    nlohmann::json j = mixfem::to_json(table);
    j["mu"] = a.mu;
    j["lambda"] = a.lambda;
    os << j.dump(2) << '\n';
  } else {
    mixfem::write_text(os, table);
  }
  return emit(a.out, os.str()) ? 0 : kExitFailure;
}

int run_verify(const VerifyArgs& a) {
  mixfem::VerifyOptions opts;
  opts.corruption = a.corruption;
  opts.infsup = !a.no_infsup;
  mixfem::VerifyReport report;
  try {
    report = mixfem::run_verification(a.k, a.level, opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  if (!emit(a.out, mixfem::to_json(report).dump(2) + "\n")) return kExitFailure;
  if (!report.passed()) {
    for (const auto& c : report.checks) {
      if (!c.passed) std::cerr << "verification failed: " << c.name << ": " << c.detail << '\n';
    }
    return kExitFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed finite elements for planar elasticity: convergence studies and verification"};
  app.require_subcommand(1);

  StudyArgs study;
  auto* s = app.add_subcommand("study", "Run a convergence study on the unit square");
  s->add_option("--k", study.k, "Polynomial degree of the stress space")->required()->check(CLI::IsMember({3, 4, 5}));
  s->add_option("--levels", study.levels, "Finest refinement level (level 1 = two triangles)")
      ->required()
      ->check(CLI::Range(1, 6));
  s->add_option("--mu", study.mu, "Lame constant mu")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--lambda", study.lambda, "Lame constant lambda")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--format", study.format, "Output format")
      ->capture_default_str()
      ->check(CLI::IsMember({"text", "csv", "json"}));
  s->add_option("--out", study.out, "Write the table here instead of stdout");
  s->add_option("--dump-system", study.dump,
                "Write the finest-level saddle matrix (Matrix Market) to PATH and its right-hand side to PATH.rhs");
  s->add_option("--threads", study.threads, "Assembly threads")->capture_default_str()->check(CLI::Range(1, 256));
  const std::map<std::string, mixfem::Diagonal> diagonals{{"sw-ne", mixfem::Diagonal::south_west_north_east},
                                                          {"se-nw", mixfem::Diagonal::south_east_north_west}};
  s->add_option("--diagonal", study.diagonal, "Diagonal of the level-1 square")
      ->transform(CLI::CheckedTransformer(diagonals, CLI::ignore_case));

  VerifyArgs verify;
  auto* v = app.add_subcommand("verify", "Run the verification checks and emit a JSON report");
  v->add_option("--k", verify.k, "Polynomial degree")->required()->check(CLI::IsMember({3, 4, 5}));
  v->add_option("--level", verify.level, "Refinement level of the global checks")
      ->capture_default_str()
      ->check(CLI::Range(1, 3));
  const std::map<std::string, mixfem::Corruption> corruptions{
      {"flipped-restriction-sign", mixfem::Corruption::flipped_restriction_sign},
      {"misaligned-bubble", mixfem::Corruption::misaligned_bubble}};
  v->add_option("--corrupt", verify.corruption, "Negative control: damage the stress space before checking")
      ->transform(CLI::CheckedTransformer(corruptions, CLI::ignore_case));
  v->add_option("--out", verify.out, "Write the JSON report here instead of stdout");
  v->add_flag("--no-infsup", verify.no_infsup, "Skip the dense inf-sup estimate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (s->parsed()) return run_study(study);
  return run_verify(verify);
}

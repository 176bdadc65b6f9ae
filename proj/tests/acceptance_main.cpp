// Acceptance runner: one pass/fail line per criterion, nonzero exit if any
// fails.  Criteria 1-10 come from the library's verify suite; criterion 11
// drives the built aa-phase binary (path in argv[1]) end to end and checks
// that its machine output is byte-identical across repeated runs and across
// thread counts.

#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <aaphase/aaphase.hpp>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Run a shell command, return its exit status (-1 on spawn failure).
int run_cmd(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string brief(double v) {
    char buf[32];
    const auto r =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 3);
    return std::string(buf, r.ptr);
}

} // namespace

int main(int argc, char** argv) {
    int failures = 0;
    for (const aaphase::CriterionResult& r : aaphase::run_acceptance()) {
        std::printf("[%s] %02d %s: max deviation %s (tol %s) -- %s\n",
                    r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    brief(r.max_deviation).c_str(), brief(r.tolerance).c_str(),
                    r.detail.c_str());
        if (!r.passed) ++failures;
    }

    // Criterion 11: the CLI itself.
    bool ok = true;
    std::string note = "verify exits 0; evolve and scan outputs byte-identical "
                       "across runs and thread counts";
    const auto fail = [&](const std::string& why) {
        if (ok) note = why;
        ok = false;
    };

    if (argc < 2) {
        fail("path to the aa-phase binary was not supplied");
    } else {
        const std::string tool = std::string("\"") + argv[1] + "\"";
        const fs::path dir =
            fs::temp_directory_path() / ("aaphase-acceptance-" + std::to_string(getpid()));
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) fail("cannot create temp directory " + dir.string());

        const auto out = [&](const char* name) { return (dir / name).string(); };
        const auto expect = [&](const std::string& cmd, int want,
                                const std::string& what) {
            const int got = run_cmd(cmd + " 2>/dev/null");
            if (got != want)
                fail(what + ": exit " + std::to_string(got) + ", expected " +
                     std::to_string(want));
        };
        const auto same = [&](const char* a, const char* b, const std::string& what) {
            const std::string ca = slurp(dir / a), cb = slurp(dir / b);
            if (ca.empty() || ca != cb) fail(what + ": outputs differ or are empty");
        };

        expect(tool + " verify --json --out " + out("v1.json"), 0, "verify run 1");
        expect(tool + " verify --json --out " + out("v2.json"), 0, "verify run 2");
        same("v1.json", "v2.json", "verify determinism");

        const std::string evolve_args =
            " evolve --oracle eps2=1 d0=1.25 omega=0.9 t_max=40 n_points=400";
        expect(tool + evolve_args + " --out " + out("e1.csv"), 0, "evolve run 1");
        expect(tool + evolve_args + " --out " + out("e2.csv"), 0, "evolve run 2");
        same("e1.csv", "e2.csv", "evolve determinism");

        const std::string scan_args =
            " scan d0=0.8 axis=omega axis_min=0.3 axis_max=2.7 axis_steps=41";
        expect("AA_PHASE_THREADS=1 " + tool + scan_args + " --out " + out("s1.csv"),
               0, "scan with one thread");
        expect("AA_PHASE_THREADS=4 " + tool + scan_args + " --out " + out("s2.csv"),
               0, "scan with four threads");
        same("s1.csv", "s2.csv", "scan thread-count invariance");

        fs::remove_all(dir, ec);
    }

    std::printf("[%s] 11 cli-determinism: %s\n", ok ? "PASS" : "FAIL", note.c_str());
    if (!ok) ++failures;

    return failures == 0 ? 0 : 1;
}

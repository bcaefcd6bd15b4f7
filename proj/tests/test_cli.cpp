#include "fiberline/extraction.hpp"
#include "fiberline/polygon.hpp"
#include "support/report.hpp"

#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class Workdir {
  public:
    Workdir() {
        char tmpl[] = "/tmp/fiberline-cli-XXXXXX";
        dir_ = ::mkdtemp(tmpl);
    }
    ~Workdir() {
        std::error_code ec;
        fs::permissions(dir_, fs::perms::owner_all, fs::perm_options::add, ec);
        for (const auto& e : fs::directory_iterator(dir_, ec))
            fs::permissions(e.path(), fs::perms::owner_all, fs::perm_options::add, ec);
        fs::remove_all(dir_, ec);
    }
    fs::path operator/(const std::string& name) const { return dir_ / name; }
    const fs::path& path() const { return dir_; }

    Outcome run(const std::string& args) const {
        const fs::path out = dir_ / ".stdout", err = dir_ / ".stderr";
        const std::string cmd = std::string(FIBERLINE_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                                err.string();
        const int status = std::system(cmd.c_str());
        Outcome o;
        o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.out = slurp(out);
        o.err = slurp(err);
        return o;
    }

  private:
    fs::path dir_;
};

std::vector<std::string> sorted_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line))
        if (!line.empty())
            rows.push_back(line);
    std::sort(rows.begin(), rows.end());
    return rows;
}

// Starts `serve`, waits for the address line, then stops it with SIGTERM.
struct ServeResult {
    std::string first_line;
    int code = -1;
};

ServeResult serve_once(const std::vector<std::string>& args) {
    int fds[2];
    REQUIRE(::pipe(fds) == 0);
    const pid_t pid = ::fork();
    if (pid == 0) {
        ::dup2(fds[1], STDOUT_FILENO);
        ::close(fds[0]);
        ::close(fds[1]);
        std::vector<char*> argv{const_cast<char*>(FIBERLINE_CLI_PATH), const_cast<char*>("serve")};
        for (const std::string& a : args)
            argv.push_back(const_cast<char*>(a.c_str()));
        argv.push_back(nullptr);
        ::execv(FIBERLINE_CLI_PATH, argv.data());
        ::_exit(127);
    }
    ::close(fds[1]);
    ServeResult r;
    char c;
    while (::read(fds[0], &c, 1) == 1 && c != '\n')
        r.first_line += c;
    ::kill(pid, SIGTERM);
    int status = 0;
    ::waitpid(pid, &status, 0);
    ::close(fds[0]);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace

TEST_CASE("gen") {
    Workdir w;
    Outcome o = w.run("gen polygon --shape ngon --edges 60 --center 0 0 --radius 1 --out " + (w / "f.poly").string());
    CHECK(o.code == 0);
    CHECK(o.out == "edges=60\n");
    const auto poly = fiberline::load_polygon(w / "f.poly");
    CHECK(poly.edge_count() == 60);
    CHECK(poly.chains().front().closed);

    o = w.run("gen doublegyre --nx 256 --ny 128 --out " + (w / "dg.bvf2").string());
    CHECK(o.code == 0);
    CHECK(o.out.find("cells=64770\n") != std::string::npos);
    CHECK(fiberline::load_field(w / "dg.bvf2").cell_count() == 64770);

    o = w.run("gen doublegyre --nx 181 --ny 91 --out " + (w / "small.bvf2").string());
    CHECK(o.out.find("cells=32400\n") != std::string::npos);

    o = w.run("gen doublegyre --nx 10");
    CHECK(o.code == 2);
    CHECK(o.err.find("--out") != std::string::npos);
    CHECK(w.run("gen polygon --edges 2 --out " + (w / "bad.poly").string()).code == 2);
    CHECK(w.run("gen polygon --shape blob --out " + (w / "bad.poly").string()).code == 2);
    CHECK(w.run("gen doublegyre --bogus 1 --out " + (w / "x.bvf2").string()).code == 2);
    CHECK(w.run("gen doublegyre --nx 10 --ny 10 --out /nonexistent/dir/x.bvf2").code == 1);
}

TEST_CASE("extract") {
    Workdir w;
    REQUIRE(w.run("gen identity --nx 21 --ny 21 --domain 0 0 1 1 --out " + (w / "id.bvf2").string()).code == 0);
    fiberline::save_polygon(fiberline::ControlPolygon({{0.2, 0.2}, {0.7, 0.2}, {0.7, 0.7}, {0.2, 0.7}}, true),
                            w / "square.poly");
    const std::string inputs = "--mesh " + (w / "id.bvf2").string() + " --polygon " + (w / "square.poly").string();

    Outcome o = w.run("extract " + inputs + " --method hybrid --out " + (w / "hybrid.csv").string());
    REQUIRE(o.code == 0);
    CHECK(o.out.find("method=hybrid\n") != std::string::npos);
    CHECK(o.out.find("leaf_cells=1\n") != std::string::npos);
    CHECK(o.out.find("tpap=") != std::string::npos);
    const std::string hybrid = slurp(w / "hybrid.csv");
    CHECK(hybrid.rfind("cell_id,edge_id,px,py,qx,qy\n", 0) == 0);
    double length = 0;
    for (const std::string& row : sorted_rows(hybrid)) {
        const fltest::Row cells = fltest::split_csv(row);
        REQUIRE(cells.size() == 6);
        length += std::hypot(std::stod(cells[4]) - std::stod(cells[2]), std::stod(cells[5]) - std::stod(cells[3]));
    }
    CHECK(std::fabs(length - 2.0) <= 1e-9);

    for (const char* m : {"naive", "single", "dual"}) {
        o = w.run("extract " + inputs + " --method " + m + " --out " + (w / "other.csv").string());
        CHECK(o.code == 0);
        CHECK(sorted_rows(slurp(w / "other.csv")) == sorted_rows(hybrid));
    }
    o = w.run("extract " + inputs + " --method single");
    CHECK(o.out.find("leaf_cells=8\n") != std::string::npos);
    o = w.run("extract " + inputs + " --method dual --recursion edges-first --leaf-cells 3 --leaf-edges 2");
    CHECK(o.code == 0);
    CHECK(o.out.find("recursion=edges-first\nleaf_cells=3\nleaf_edges=2\n") != std::string::npos);

    // The identity field maps the square to itself, so equivalence returns its trace.
    o = w.run("extract " + inputs + " --equivalence --out " + (w / "eq.csv").string());
    CHECK(o.code == 0);
    length = 0;
    for (const std::string& row : sorted_rows(slurp(w / "eq.csv"))) {
        const fltest::Row cells = fltest::split_csv(row);
        length += std::hypot(std::stod(cells[4]) - std::stod(cells[2]), std::stod(cells[5]) - std::stod(cells[3]));
    }
    CHECK(std::fabs(length - 2.0) <= 1e-9);

    // Outside the codomain: no segments, still success.
    fiberline::save_polygon(fiberline::ControlPolygon({{5, 5}, {6, 5}, {6, 6}}, true), w / "far.poly");
    o = w.run("extract --mesh " + (w / "id.bvf2").string() + " --polygon " + (w / "far.poly").string());
    CHECK(o.code == 0);
    CHECK(o.out.find("segments=0\n") != std::string::npos);

    o = w.run("extract --mesh " + (w / "missing.bvf2").string() + " --polygon " + (w / "square.poly").string());
    CHECK(o.code == 1);
    CHECK_FALSE(o.err.empty());
    CHECK(w.run("extract " + inputs + " --method quadtree").code == 2);
    CHECK(w.run("extract " + inputs + " --recursion random").code == 2);
    CHECK(w.run("extract --polygon " + (w / "square.poly").string()).code == 2);
}

TEST_CASE("bench") {
    Workdir w;
    const std::string small = "--nx 40 --ny 20 ";
    const Outcome a = w.run("bench --case 1 --placements 5 --seed 7 " + small);
    const Outcome b = w.run("bench --case 1 --placements 5 --seed 7 " + small);
    REQUIRE(a.code == 0);
    CHECK(fltest::without_timings(a.out) == fltest::without_timings(b.out));
    const fltest::Report r = fltest::parse_report(a.out);
    CHECK(r.rows.size() == 9 * 5 * 4);
    CHECK(r.summary.size() == 4);
    CHECK(fltest::without_timings(w.run("bench --case 1 --placements 5 --seed 8 " + small).out) !=
          fltest::without_timings(a.out));

    const Outcome c3 = w.run("bench --case 3 --placements 101 --seed 1 " + small + "--out " + (w / "c3.csv").string());
    REQUIRE(c3.code == 0);
    const fltest::Report r3 = fltest::parse_report(slurp(w / "c3.csv"));
    const std::size_t method = fltest::column(r3.header, "method");
    for (const char* m : {"naive", "single", "dual", "hybrid"})
        CHECK(std::count_if(r3.rows.begin(), r3.rows.end(), [&](const fltest::Row& row) { return row[method] == m; }) ==
              101);

    const Outcome c2 = w.run("bench --case 2 --isovalues 11 --component v --methods hybrid dual " + small);
    CHECK(c2.code == 0);
    CHECK(fltest::parse_report(c2.out).rows.size() == 22);

    const Outcome one = w.run("bench --case 1 --placements 2 --edges 60 3 --methods hybrid " + small);
    CHECK(fltest::parse_report(one.out).rows.size() == 4);

    CHECK(w.run("bench --case 4").code == 2);
    CHECK(w.run("bench").code == 2);
    CHECK(w.run("bench --case 1 --methods octree").code == 2);
    CHECK(w.run("bench --case 1 --edges 7 " + small).code == 2);
    CHECK(w.run("bench --case 1 --mesh " + (w / "none.bvf2").string()).code == 1);
}

TEST_CASE("serve") {
    Workdir w;
    REQUIRE(w.run("gen identity --nx 4 --ny 4 --out " + (w / "a.bvf2").string()).code == 0);
    REQUIRE(w.run("gen doublegyre --nx 8 --ny 4 --out " + (w / "b.bvf2").string()).code == 0);
    const ServeResult s = serve_once({"--port", "0", "--data", w.path().string()});
    CHECK(s.first_line.rfind("listening on http://127.0.0.1:", 0) == 0);
    CHECK(s.first_line.find("(2 datasets)") != std::string::npos);
    CHECK(s.first_line.find(":0 ") == std::string::npos);
    CHECK(s.code == 0);

    CHECK(w.run("serve --port 0 --data " + (w / "nope").string()).code == 1);
    if (::geteuid() != 0) {
        fs::create_directory(w / "locked");
        ::chmod((w / "locked").c_str(), 0);
        CHECK(w.run("serve --port 0 --data " + (w / "locked").string()).code == 1);
    }

    // A port someone else holds.
    const int sock = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::bind(sock, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(::listen(sock, 1) == 0);
    socklen_t len = sizeof addr;
    ::getsockname(sock, reinterpret_cast<sockaddr*>(&addr), &len);
    const Outcome busy =
        w.run("serve --port " + std::to_string(ntohs(addr.sin_port)) + " --data " + w.path().string());
    CHECK(busy.code == 1);
    ::close(sock);
}

// Command-line front end: one command per invocation on a JSON session.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fexp/commands.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw fexp::InputError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const char* exit_help =
    "Exit status:\n"
    "  0  all checks passed\n"
    "  1  checks ran and reported violations\n"
    "  2  input error (unreadable file, parse error, missing block, bad command line)\n"
    "  3  a mathematical precondition failed\n"
    "  4  an internal identity failed\n";

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Formal exponential maps and Grothendieck connections on graded charts"};
    app.footer(exit_help);
    std::string command, session_path, out_path, qp_path, fexp_path, point_path;
    std::optional<int> order, form_order;

    std::string commands;
    for (const auto& c : fexp::command_names()) commands += (commands.empty() ? "" : ", ") + c;
    app.add_option("command", command, "One of: " + commands)->required();
    app.add_option("--session", session_path, "Session file (JSON)");
    app.add_option("--order", order, "Resolution truncation order (overrides the chart)");
    app.add_option("--form-order", form_order, "Form-degree truncation order (overrides the chart)");
    app.add_option("--out", out_path, "Write the resulting session here");
    app.add_option("--qp", qp_path, "linearize: session file providing the qp block");
    app.add_option("--fexp", fexp_path, "linearize: session file providing the fexp block");
    app.add_option("--point", point_path, "linearize: session file providing the point block");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : fexp::exit_input;
    }

    fexp::Session session;
    try {
        const fexp::TruncationOverride over{order, form_order};
        std::string base = session_path.empty() ? qp_path : session_path;
        if (base.empty()) throw fexp::InputError("--session is required");
        session = fexp::parse_session(read_file(base), over);
        auto take = [&](const std::string& path, auto member, const char* block) {
            if (path.empty()) return;
            fexp::Session other = fexp::parse_session(read_file(path), over);
            if (!other.chart->same_layout(*session.chart))
                throw fexp::InputError(std::string("--") + block + ": chart differs from the session chart");
            if (!(other.*member)) throw fexp::InputError(path + ": no '" + block + "' block");
            session.*member = other.*member;
        };
        take(qp_path, &fexp::Session::qp, "qp");
        take(fexp_path, &fexp::Session::fexp, "fexp");
        take(point_path, &fexp::Session::point, "point");
    } catch (const fexp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return fexp::exit_input;
    }

    const fexp::CommandResult r = fexp::run_command(command, session);
    std::cout << r.report;
    if (!out_path.empty()) {
        if (!r.output) {
            std::cerr << "note: '" << command << "' produces no session; --out ignored\n";
        } else {
            std::ofstream out(out_path, std::ios::binary);
            if (!out) {
                std::cerr << "error: cannot write '" << out_path << "'\n";
                return fexp::exit_input;
            }
            out << fexp::serialize_session(*r.output);
        }
    }
    return r.exit_code;
}

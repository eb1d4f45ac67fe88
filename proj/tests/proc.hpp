#pragma once

// Runs a shell command and captures its standard output.

#include <array>
#include <cstdio>
#include <string>
#include <sys/wait.h>

struct ProcResult {
    int exit_code = -1;
    std::string out;
};

inline ProcResult run_command(const std::string& cmd) {
    ProcResult r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string quote(const std::string& s) {
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

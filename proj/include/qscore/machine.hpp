#pragma once

#include <sys/utsname.h>

#include <fstream>
#include <map>
#include <string>
#include <thread>

namespace qscore {

/// CPU model, core count, memory and kernel of the host, for reports.
inline std::map<std::string, std::string> describe_machine() {
    std::map<std::string, std::string> m;
    std::ifstream cpu("/proc/cpuinfo");
    for (std::string line; std::getline(cpu, line);) {
        if (line.rfind("model name", 0) == 0) {
            const auto colon = line.find(':');
            if (colon != std::string::npos) m["cpu"] = line.substr(line.find_first_not_of(' ', colon + 1));
            break;
        }
    }
    m["hardware_threads"] = std::to_string(std::thread::hardware_concurrency());
    std::ifstream mem("/proc/meminfo");
    for (std::string line; std::getline(mem, line);) {
        if (line.rfind("MemTotal:", 0) == 0) {
            m["memory"] = line.substr(line.find_first_not_of(' ', 9));
            break;
        }
    }
    utsname u{};
    if (uname(&u) == 0) {
        m["os"] = std::string(u.sysname) + " " + u.release + " " + u.machine;
    }
    return m;
}

}  // namespace qscore

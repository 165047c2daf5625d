#pragma once

#include <cstddef>
#include <memory>
#include <shared_mutex>
#include <string>

#include "hashi/io.hpp"

namespace hashi {

// Single lab-bench session. Mutations take an exclusive lock, reads a shared one.
// Every mutation that produces curves appends them to the sheet, so
// sheet rows = step counter + 1.
class Session {
public:
    explicit Session(DiscreteCurve initial);

    json get_curve() const;
    json put_curve(const json &body);
    json step(const json &body);          // {"delta1", "count"}
    json backlund(const json &body);      // {"lambda0": [re, im], "s0": [re, im]} or {"lambda0", "periodic": true}
    json semidiscrete(const json &body);  // {"dt", "steps"}
    json surface() const;
    json reset();
    json health() const;

    std::size_t counter() const;

private:
    void append(const DiscreteCurve &c, const std::string &kind);

    DiscreteCurve initial_;
    DiscreteCurve curve_;
    SurfaceSheet sheet_;
    std::size_t counter_ = 0;
    mutable std::shared_mutex mu_;
};

// JSON-over-HTTP front end for a Session.
class HttpService {
public:
    explicit HttpService(Session &s);
    ~HttpService();

    // port 0 binds any free port; returns the bound port or -1
    int bind(const std::string &host, int port);
    bool run();  // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace hashi

#include <string>

#include "doctest.h"
#include "vmcsim/domain.hpp"

using namespace vmc;

namespace {

ClusterState two_host_cluster() {
    ClusterState c;
    c.hosts.resize(2);
    c.hosts[0].spec = {1000, 4096, 1024, 100, 200, "a"};
    c.hosts[1].spec = {1000, 4096, 1024, 100, 200, "b"};
    c.hosts[0].active = true;
    c.hosts[0].add_vm(1);
    c.hosts[0].add_vm(2);
    c.vm_assignment = {{1, 0}, {2, 0}};
    return c;
}

bool any_finding_contains(const std::vector<std::string>& findings,
                          const std::string& needle) {
    for (const auto& f : findings)
        if (f.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("push_history keeps a sliding window, oldest first") {
    HostState h;
    for (int i = 0; i < 5; ++i)
        h.push_history({0.1 * i, 0.0, 0.0}, 3);
    REQUIRE(h.history.size() == 3);
    CHECK(h.history[0].cpu == doctest::Approx(0.2));
    CHECK(h.history[2].cpu == doctest::Approx(0.4));

    HostState h1;
    h1.push_history({0.5, 0.5, 0.5}, 1);
    h1.push_history({0.7, 0.7, 0.7}, 1);
    REQUIRE(h1.history.size() == 1);
    CHECK(h1.history[0].cpu == 0.7);
}

TEST_CASE("resident VM bookkeeping stays sorted") {
    HostState h;
    h.add_vm(5);
    h.add_vm(1);
    h.add_vm(3);
    CHECK(h.resident_vms == std::vector<int>{1, 3, 5});
    CHECK(h.hosts_vm(3));
    h.remove_vm(3);
    CHECK(h.resident_vms == std::vector<int>{1, 5});
    CHECK_FALSE(h.hosts_vm(3));
}

TEST_CASE("validate_cluster accepts a consistent cluster") {
    ClusterState c = two_host_cluster();
    CHECK(validate_cluster(c).empty());
}

TEST_CASE("validate_cluster flags an occupied inactive host") {
    ClusterState c = two_host_cluster();
    c.hosts[0].active = false;
    auto findings = validate_cluster(c);
    REQUIRE_FALSE(findings.empty());
    CHECK(any_finding_contains(findings, "inactive"));
}

TEST_CASE("validate_cluster flags a VM resident on two hosts") {
    ClusterState c = two_host_cluster();
    c.hosts[1].active = true;
    c.hosts[1].add_vm(2);
    auto findings = validate_cluster(c);
    CHECK(any_finding_contains(findings, "vm 2"));
}

TEST_CASE("validate_cluster flags assignment map inconsistencies") {
    ClusterState c = two_host_cluster();

    SUBCASE("resident VM missing from map") {
        c.vm_assignment.erase(2);
        CHECK_FALSE(validate_cluster(c).empty());
    }
    SUBCASE("map points at the wrong host") {
        c.vm_assignment[2] = 1;
        CHECK_FALSE(validate_cluster(c).empty());
    }
    SUBCASE("map entry with no resident VM anywhere") {
        c.vm_assignment[9] = 0;
        CHECK_FALSE(validate_cluster(c).empty());
    }
    SUBCASE("map entry with an out-of-range host index") {
        c.vm_assignment[2] = 7;
        CHECK_FALSE(validate_cluster(c).empty());
    }
}

TEST_CASE("validate_cluster flags broken time accounting") {
    ClusterState c = two_host_cluster();
    c.hosts[0].total_active_seconds = 100.0;
    c.hosts[0].total_full_utilization_seconds = 200.0;
    auto findings = validate_cluster(c);
    CHECK(any_finding_contains(findings, "accounting"));
}

TEST_CASE("validate_cluster flags out-of-range history samples") {
    ClusterState c = two_host_cluster();
    c.hosts[0].push_history({1.5, 0.0, 0.0}, 12);
    CHECK_FALSE(validate_cluster(c).empty());
}

TEST_CASE("host_power interpolates linearly between idle and peak") {
    HostSpec spec{1000, 4096, 1024, 86, 117, "g4"};
    CHECK(host_power(spec, 0.0) == 86.0);
    CHECK(host_power(spec, 1.0) == 117.0);
    CHECK(host_power(spec, 0.5) == doctest::Approx(101.5));
}

TEST_CASE("clamp01") {
    CHECK(clamp01(-0.2) == 0.0);
    CHECK(clamp01(0.3) == 0.3);
    CHECK(clamp01(1.7) == 1.0);
}

TEST_CASE("LoadState names") {
    CHECK(std::string(to_string(LoadState::Overloaded)) == "overloaded");
    CHECK(std::string(to_string(LoadState::Underloaded)) == "underloaded");
    CHECK(std::string(to_string(LoadState::Normal)) == "normal");
}

// Copyright 2026 The Lightcone Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "lightcone/errors.hpp"
#include "lightcone/hamiltonian.hpp"

using namespace lightcone;
using nlohmann::json;

namespace {

json chain_json() {
  return json::parse(R"({
    "sites": [
      {"id": 0, "dim": 2, "kind": "system"},
      {"id": 1, "dim": 2, "kind": "environment"},
      {"id": 2, "dim": 3, "kind": "environment"}
    ],
    "terms": [
      {"sites": [0, 1], "ops": ["sx", "sx"], "coeff": 0.3},
      {"sites": [1, 2], "ops": ["sz", "n"], "coeff": -0.25},
      {"sites": [2], "ops": ["n"], "coeff": 1.5}
    ],
    "system_ids": [0]
  })");
}

}  // namespace

TEST_CASE("spec JSON round trip preserves every field") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  CHECK(spec.sites.size() == 3);
  CHECK(spec.terms.size() == 3);
  CHECK(spec.system_ids == std::vector<int>{0});
  CHECK(spec.sites[2].dim == 3);
  CHECK(spec.sites[0].kind == SiteKind::System);
  CHECK(spec.terms[1].coeff == doctest::Approx(-0.25));

  const HamiltonianSpec again = spec_from_json(spec_to_json(spec));
  CHECK(spec_to_json(again) == spec_to_json(spec));
}

TEST_CASE("unknown JSON fields are rejected at every level") {
  json spec_level = chain_json();
  spec_level["extra"] = 1;
  CHECK_THROWS_AS((void)spec_from_json(spec_level), ValidationError);

  json site_level = chain_json();
  site_level["sites"][0]["color"] = "red";
  CHECK_THROWS_AS((void)spec_from_json(site_level), ValidationError);

  json term_level = chain_json();
  term_level["terms"][0]["weight"] = 2.0;
  CHECK_THROWS_AS((void)spec_from_json(term_level), ValidationError);
}

TEST_CASE("validation catches malformed specs") {
  HamiltonianSpec dup = spec_from_json(chain_json());
  dup.sites[1].id = 0;
  CHECK_THROWS_AS(validate_spec(dup), ValidationError);

  HamiltonianSpec ghost = spec_from_json(chain_json());
  ghost.terms[0].sites[1] = 9;
  CHECK_THROWS_AS(validate_spec(ghost), ValidationError);

  HamiltonianSpec repeated = spec_from_json(chain_json());
  repeated.terms[0].sites = {0, 0};
  CHECK_THROWS_AS(validate_spec(repeated), ValidationError);

  HamiltonianSpec tiny = spec_from_json(chain_json());
  tiny.sites[1].dim = 1;
  CHECK_THROWS_AS(validate_spec(tiny), ValidationError);

  HamiltonianSpec no_system = spec_from_json(chain_json());
  no_system.system_ids.clear();
  CHECK_THROWS_AS(validate_spec(no_system), ValidationError);

  HamiltonianSpec kind_clash = spec_from_json(chain_json());
  kind_clash.system_ids = {1};  // declared environment
  CHECK_THROWS_AS(validate_spec(kind_clash), ValidationError);

  HamiltonianSpec bad_op = spec_from_json(chain_json());
  bad_op.terms[0].ops[0] = "sq";
  CHECK_THROWS_AS(validate_spec(bad_op), ValidationError);

  HamiltonianSpec wrong_dim_op = spec_from_json(chain_json());
  wrong_dim_op.terms[2].ops[0] = "sx";  // Pauli on a dim-3 site
  CHECK_THROWS_AS(validate_spec(wrong_dim_op), ValidationError);

  HamiltonianSpec inf_coeff = spec_from_json(chain_json());
  inf_coeff.terms[0].coeff = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(validate_spec(inf_coeff), ValidationError);
}

TEST_CASE("total_dim multiplies local dimensions and honors the cap") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  CHECK(spec.total_dim() == 12);
  CHECK_THROWS_AS((void)spec.total_dim(8), ResourceError);
  CHECK(spec.total_dim(12) == 12);
}

TEST_CASE("site lookup helpers") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  CHECK(spec.site_index(2) == 2);
  CHECK(spec.site_index(7) == -1);
  CHECK(spec.dim_of(2) == 3);
  CHECK(spec.is_system(0));
  CHECK_FALSE(spec.is_system(1));
}

TEST_CASE("op_norm_max is the largest term-wise product of local norms") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  // Terms: sx*sx -> 1, sz*n(dim 3) -> 2, n(dim 3) -> 2; coefficients excluded.
  CHECK(op_norm_max(spec) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rescale_spec divides coefficients and returns the time factor") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  const auto [scaled, factor] = rescale_spec(spec, 3.0);
  CHECK(factor == doctest::Approx(3.0));
  CHECK(scaled.terms[0].coeff == doctest::Approx(0.1));
  CHECK(scaled.terms[1].coeff == doctest::Approx(-0.25 / 3.0));
  CHECK_THROWS_AS((void)rescale_spec(spec, 0.0), ValidationError);
  CHECK_THROWS_AS((void)rescale_spec(spec, -2.0), ValidationError);
}

TEST_CASE("spec file round trip") {
  const HamiltonianSpec spec = spec_from_json(chain_json());
  const std::string path = "test_spec_roundtrip.json";
  save_spec_file(spec, path);
  const HamiltonianSpec loaded = load_spec_file(path);
  CHECK(spec_to_json(loaded) == spec_to_json(spec));
  std::remove(path.c_str());
  CHECK_THROWS_AS((void)load_spec_file("does_not_exist.json"), ValidationError);
}

TEST_CASE("site kind string conversion is total and invertible") {
  CHECK(to_string(SiteKind::System) == "system");
  CHECK(to_string(SiteKind::Environment) == "environment");
  CHECK(site_kind_from_string("system") == SiteKind::System);
  CHECK(site_kind_from_string("environment") == SiteKind::Environment);
  CHECK_THROWS_AS((void)site_kind_from_string("bath"), ValidationError);
}

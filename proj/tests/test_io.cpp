#include "doctest.h"
#include "sparsemoo/io.hpp"

#include <filesystem>
#include <fstream>

using namespace sparsemoo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "sparsemoo_test_io";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("format_double round trips") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(-2.5e-10) == "-2.5e-10");
    for (double v : {1.0 / 3.0, 2.718281828459045, 1e300, -7.25}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("quadratic instance JSON round trip") {
    const auto inst = generate_quadratic(5, 10.0, 7, 2);
    const auto back = quadratic_from_json(quadratic_to_json(inst));
    CHECK(back.n == 5);
    CHECK(back.s == 2);
    CHECK(back.seed == 7);
    CHECK(back.Q1 == inst.Q1);
    CHECK(back.Q2 == inst.Q2);
    CHECK(back.c1 == inst.c1);
    CHECK(back.c2 == inst.c2);
    CHECK_FALSE(quadratic_to_json(inst).contains("constants"));

    const auto ex = example_problem();
    const auto ex_back = quadratic_from_json(quadratic_to_json(ex));
    CHECK(ex_back.constants == ex.constants);
}

TEST_CASE("malformed instances are data errors") {
    auto j = quadratic_to_json(generate_quadratic(3, 1.0, 0));
    j["Q1"].erase(0);
    CHECK_THROWS_AS(quadratic_from_json(j), DataError);
    j = quadratic_to_json(generate_quadratic(3, 1.0, 0));
    j.erase("c2");
    CHECK_THROWS_AS(quadratic_from_json(j), DataError);

    const fs::path bad = temp_dir() / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(load_instance(bad.string()), DataError);
    const fs::path unknown = temp_dir() / "unknown.json";
    std::ofstream(unknown) << R"({"type": "cubic"})";
    CHECK_THROWS_AS(load_instance(unknown.string()), DataError);
    CHECK_THROWS_AS(load_instance((temp_dir() / "missing.json").string()), DataError);
}

TEST_CASE("load_instance for both problem types") {
    const fs::path path = temp_dir() / "quad.json";
    write_json(path.string(), quadratic_to_json(generate_quadratic(4, 10.0, 1, 2)));
    const auto q = load_instance(path.string());
    CHECK(q.type == "quadratic");
    CHECK(q.s == 2);
    CHECK(q.problem->dimension() == 4);
    CHECK(q.problem->lipschitz()(0) == 10.0);

    const auto l = load_instance((fs::path(SPARSEMOO_SOURCE_DIR) / "data" / "wine.json").string());
    CHECK(l.logistic);
    CHECK(l.problem->dimension() == 13);
    CHECK(l.s == 4);
}

TEST_CASE("front CSV round trip") {
    Front f;
    Vector x(3);
    x << 0.5, 0, -1.25;
    Vector v(2);
    v << 1.5, 2.0 / 3.0;
    f.rows.push_back({v, x, SupportSet({0, 2}, 3)});
    v << 0.25, 3;
    x << 0, 2, 0;
    f.rows.push_back({v, x, SupportSet({1, 2}, 3)});
    const std::string text = front_csv(f);
    CHECK(text.substr(0, text.find('\n')) == "f1,f2,support,x_1,x_2,x_3");
    const fs::path path = temp_dir() / "front.csv";
    write_front_csv(path.string(), f);
    const Front back = read_front_csv(path.string());
    REQUIRE(back.size() == 2);
    CHECK(back.rows[0].f == f.rows[0].f);
    CHECK(*back.rows[0].x == *f.rows[0].x);
    CHECK(back.rows[1].support->to_string() == "2;3");
    CHECK(front_csv(back) == text);

    std::ofstream(path) << "f1,f2\n1,abc\n";
    CHECK_THROWS_AS(read_front_csv(path.string()), DataError);
    std::ofstream(path) << "a,b\n1,2\n";
    CHECK_THROWS_AS(read_front_csv(path.string()), DataError);
}

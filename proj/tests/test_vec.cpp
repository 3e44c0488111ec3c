#include <catch2/catch_amalgamated.hpp>

#include "revec/vec.hpp"

using namespace revec;

TEST_CASE("vector arithmetic basics") {
    const Vec3 a{1.0, 2.0, 3.0};
    const Vec3 b{-4.0, 0.5, 2.0};
    CHECK(dot(a, b) == -4.0 + 1.0 + 6.0);
    const Vec3 c = cross(a, b);
    CHECK(dot(c, a) == Catch::Approx(0.0).margin(1e-12));
    CHECK(dot(c, b) == Catch::Approx(0.0).margin(1e-12));
    CHECK(length(Vec3{3.0, 4.0, 0.0}) == 5.0);
    CHECK(length(normalized(a)) == Catch::Approx(1.0));
}

TEST_CASE("mat4 identity and composition") {
    const Mat4 id = Mat4::identity();
    const Vec4 v = id.mul(Vec3{1.5, -2.0, 0.25});
    CHECK(v.x == 1.5);
    CHECK(v.y == -2.0);
    CHECK(v.z == 0.25);
    CHECK(v.w == 1.0);
    CHECK(id.determinant() == 1.0);

    Mat4 t = Mat4::identity();
    t.at(0, 3) = 2.0;
    Mat4 s = Mat4::identity();
    s.at(1, 1) = 3.0;
    const Mat4 ts = t.mul(s);
    const Vec3 p = ts.mul_point({1.0, 1.0, 1.0});
    CHECK(p.x == 3.0);
    CHECK(p.y == 3.0);
    CHECK(p.z == 1.0);
}

TEST_CASE("mat4 inverse round-trips") {
    Mat4 m = Mat4::identity();
    m.at(0, 0) = 2.0;
    m.at(0, 1) = 1.0;
    m.at(1, 2) = -3.0;
    m.at(1, 1) = 0.5;
    m.at(2, 3) = 4.0;
    m.at(3, 0) = 0.25;
    Mat4 inv;
    REQUIRE(invert(m, inv));
    const Mat4 prod = m.mul(inv);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(prod.at(i, j) == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-12));
}

TEST_CASE("singular matrix has no inverse") {
    Mat4 m;  // all zeros
    Mat4 inv;
    CHECK_FALSE(invert(m, inv));
    CHECK(m.determinant() == 0.0);
}

TEST_CASE("aabb extend and corners") {
    Aabb box;
    CHECK(box.empty());
    box.extend({1.0, 2.0, 3.0});
    box.extend({-1.0, 0.0, 5.0});
    CHECK_FALSE(box.empty());
    CHECK(box.min.x == -1.0);
    CHECK(box.max.z == 5.0);
    CHECK(box.diagonal() == Catch::Approx(std::sqrt(4.0 + 4.0 + 4.0)));
    CHECK(box.corners().size() == 8);
}

// Copyright (C) 2026 The Stagewise Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "stagewise/errors.hpp"
#include "stagewise/latent.hpp"
#include "stagewise/text.hpp"

using namespace stagewise;

TEST(Text, WordsAreLowercaseRuns) {
    EXPECT_EQ(words("The Orange-ish pumpkin, isn't it?"),
              (std::vector<std::string>{"the", "orange-ish", "pumpkin", "isn't", "it"}));
}

TEST(Text, HeadNounAndAttributes) {
    EXPECT_EQ(head_noun("an orange pumpkin"), "pumpkin");
    EXPECT_EQ(attribute_words("an old black door"), (std::vector<std::string>{"old", "black"}));
    EXPECT_TRUE(attribute_words("door").empty());
    EXPECT_EQ(head_token_index("orange pumpkin"), 1);
    EXPECT_EQ(head_token_index("door"), 0);
}

TEST(Text, YesNo) {
    EXPECT_EQ(parse_yes_no("Yes, the cat sits on the box."), YesNo::yes);
    EXPECT_EQ(parse_yes_no("  **No.**"), YesNo::no);
    EXPECT_EQ(parse_yes_no("It depends..."), YesNo::ambiguous);
    EXPECT_EQ(parse_yes_no("maybe"), YesNo::ambiguous);
}

TEST(Text, FirstInteger) {
    EXPECT_EQ(first_integer("There are 3 objects"), 3);
    EXPECT_EQ(first_integer("two"), 2);
    EXPECT_EQ(first_integer("none"), std::nullopt);
}

TEST(Latent, DigestTracksEveryBit) {
    LatentState a(2, 3, 4, 0.25);
    LatentState b = a;
    EXPECT_EQ(digest(a), digest(b));
    b.values[7] = std::nextafter(b.values[7], 1.0);
    EXPECT_NE(digest(a), digest(b));
    LatentState c(2, 4, 3, 0.25);  // same values, different shape
    EXPECT_NE(digest(a), digest(c));
    EXPECT_EQ(digest_hex(a).size(), 16u);
}

TEST(Latent, TrajectoryBlobRoundTrip) {
    std::mt19937_64 rng(1);
    std::vector<LatentState> traj;
    for (int i = 0; i < 5; ++i)
        traj.push_back(oracle::random_latent(rng, 3, 5, 7));
    const auto path = std::filesystem::temp_directory_path() / "stagewise_traj_roundtrip.swlt";
    write_trajectory(path, traj);
    EXPECT_EQ(std::filesystem::file_size(path), 28u + 5u * 3 * 5 * 7 * 8);
    const auto back = read_trajectory(path);
    ASSERT_EQ(back.size(), traj.size());
    for (size_t i = 0; i < traj.size(); ++i)
        EXPECT_EQ(back[i], traj[i]);

    // Header is little-endian "SWLT", version 1, width 8.
    std::ifstream in(path, std::ios::binary);
    unsigned char h[12];
    in.read(reinterpret_cast<char*>(h), 12);
    EXPECT_EQ(std::string(reinterpret_cast<char*>(h), 4), "SWLT");
    EXPECT_EQ(h[4], 1);
    EXPECT_EQ(h[8], 8);
    std::filesystem::remove(path);
}

TEST(Latent, CorruptBlobIsIoError) {
    const auto path = std::filesystem::temp_directory_path() / "stagewise_traj_bad.swlt";
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE....";
    }
    try {
        read_trajectory(path);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::io);
    }
    std::filesystem::remove(path);
}

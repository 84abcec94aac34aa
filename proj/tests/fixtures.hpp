#pragma once

// frozen reference data shared by unit and acceptance tests

#include <vector>

struct FamilyConductorRow {
    int n;
    long p;
    const char* conductor;
};

// conductors of the first family member at large parameters
inline const std::vector<FamilyConductorRow>& family_conductor_rows() {
    static const std::vector<FamilyConductorRow> rows = {
        {20, -756, "42551829106699251024"},
        {20, -2000, "190293894141760627320"},
        {20, 192, "109418989131512359065"},
        {22, -692, "11978814802342833513168"},
        {21, -128, "1969541804367222465954"},
        {20, -180, "60788327295284644080"},
        {21, 3, "31512668869875559452120"},
        {20, -2448, "1653442502431742344680"},
        {20, 2704, "11379574869677285146824"},
        {21, 12, "281363114909603209392"},
        {20, -608, "16631686347989878669080"},
        {21, 192, "984770902183611232737"},
        {20, 4788, "25871512096873143639456"},
        {20, 2680, "23938195173261478962720"},
        {20, -801, "34625031227394133415352"},
        {22, 1344, "62040566837567507664447"},
        {20, -1436, "1832369310703810488288"},
        {20, 4768, "10032879618827902147272"},
        {21, -24, "31512668869875559452768"},
        {20, -1376, "37640132261240251922904"},
        {22, 64, "8862938119652501095881"},
        {21, -1536, "1969541804367222468066"},
        {20, -6, "14005630608833581979328"},
        {22, 304, "27493195799738370745848"},
        {21, 1516, "11663380372737145525968"},
        {21, 480, "39390836087344449300840"},
        {23, 1452, "6451697601805864768272"},
        {21, 4, "15756334434937779726048"},
        {21, 1248, "102416173827095568122280"},
        {20, -201, "234594312697962498467304"},
        {23, 960, "398832215384362549313205"},
        {24, 832, "373306953599763346160205"},
        {20, 1120, "30637316956823460343320"},
        {23, -84, "17448909423065861532624"},
        {22, 480, "354517524786100043822760"},
        {23, -8, "7441767284139709375008"},
        {21, -233, "149845956054714394972728"},
        {23, -96, "638131544614980078907464"},
        {24, -96, "302272836922885300534872"},
        {23, -348, "37011629587668844576720608"},
    };
    return rows;
}

struct GrowthRow {
    long sha_sqrt;
    const char* conductor;
    const char* gs;
};

// growth quotients sha / sqrt(N) for frozen (sqrt(sha), N) pairs
inline const std::vector<GrowthRow>& growth_rows() {
    static const std::vector<GrowthRow> rows = {
        {408480, "7441767284139709375008", "1.9342096803"},
        {824292, "302272836922885300534872", "1.2358410273"},
        {369982, "17448909423065861532624", "1.0362798350"},
        {83880, "60788327295284644080", "0.9024159172"},
        {102144, "281363114909603209392", "0.6220025144"},
        {222792, "6451697601805864768272", "0.6179625870"},
        {327040, "30637316956823460343320", "0.6110494864"},
        {261228, "15756334434937779726048", "0.5436405656"},
        {151794, "1969541804367222468066", "0.5191903468"},
        {1029212, "37011629587668844576720608", "0.1741167606"},
    };
    return rows;
}

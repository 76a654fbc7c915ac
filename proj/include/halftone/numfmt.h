#ifndef HALFTONE_NUMFMT_H_
#define HALFTONE_NUMFMT_H_

namespace halftone {

// Rounds x to `digits` significant decimal digits so that serializers
// printing the shortest round-trip form emit at most that many.
double RoundSignificant(double x, int digits);

}  // namespace halftone

#endif  // HALFTONE_NUMFMT_H_

#ifndef DDFL_SHA1_HPP
#define DDFL_SHA1_HPP

#include <string>
#include <string_view>

namespace ddfl {

// Lowercase hex SHA-1 digest of the bytes.
std::string sha1_hex(std::string_view data);

// Content hash following the git blob convention:
// sha1("blob " + decimal length + '\0' + content). Hashing "hello\n" gives
// ce013625030ba8dba906f756967f9e9ca394464a, same as `git hash-object`.
std::string git_blob_sha1(std::string_view content);

}  // namespace ddfl

#endif  // DDFL_SHA1_HPP

fn main() {
    std::process::exit(nanoswitch::cli::run());
}

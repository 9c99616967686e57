fn main() {
    std::process::exit(branchpath::cli::run(std::env::args_os()));
}

fn main() -> std::process::ExitCode {
    chatelet::cli::main()
}
